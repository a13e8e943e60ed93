#include "arise/kb/embedding.hpp"

#include <cctype>
#include <cmath>

#include "arise/error.hpp"
#include "arise/util/hash.hpp"

namespace arise::kb {

Vector TrigramEmbedder::embed(std::string_view text) const {
  std::string norm = " ";
  for (unsigned char c : text) {
    if (std::isalnum(c)) norm += static_cast<char>(std::tolower(c));
    else if (norm.back() != ' ') norm += ' ';
  }
  if (norm.back() != ' ') norm += ' ';
  if (norm.size() < 3) throw Error("embed.empty_text", "cannot embed text without alphanumeric content");

  Vector v(dim_, 0.0);
  for (std::size_t i = 0; i + 3 <= norm.size(); ++i)
    v[util::fnv1a64(std::string_view(norm).substr(i, 3)) % dim_] += 1.0;
  double n = l2_norm(v);
  for (double& x : v) x /= n;
  return v;
}

std::string TrigramEmbedder::id() const { return "trigram-" + std::to_string(dim_); }

double dot(const Vector& a, const Vector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(const Vector& v) { return std::sqrt(dot(v, v)); }

double cosine(const Vector& a, const Vector& b) {
  double na = l2_norm(a), nb = l2_norm(b);
  if (na == 0 || nb == 0) return 0;
  return dot(a, b) / (na * nb);
}

}  // namespace arise::kb
