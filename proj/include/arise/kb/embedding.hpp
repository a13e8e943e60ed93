#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace arise::kb {

using Vector = std::vector<double>;

/// Maps text to a unit-norm vector. Implementations must be deterministic and
/// safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;
  /// Throws `embed.empty_text` for blank input.
  virtual Vector embed(std::string_view text) const = 0;
  /// Identifier folded into cache keys so vectors from different models never mix.
  virtual std::string id() const = 0;
};

/// Character 3-gram term frequencies hashed into a fixed number of buckets,
/// L2-normalised. Text is lower-cased and runs of non-alphanumerics collapse
/// to one space before windowing.
class TrigramEmbedder final : public Embedder {
 public:
  explicit TrigramEmbedder(std::size_t dim = 512) : dim_(dim) {}
  Vector embed(std::string_view text) const override;
  std::string id() const override;

 private:
  std::size_t dim_;
};

double dot(const Vector& a, const Vector& b);
double cosine(const Vector& a, const Vector& b);
double l2_norm(const Vector& v);

}  // namespace arise::kb
