#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "arise/metrics/metrics.hpp"
#include "arise/pipeline/scenario.hpp"

// Random run logs and brute-force metric recomputations written without the
// library's helpers.
namespace records {

inline std::vector<arise::metrics::RunRecord> random_log(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cat(0, 7), kind(0, 2), repairs(1, 10);
  std::vector<arise::metrics::RunRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    arise::metrics::RunRecord r;
    r.category = std::string(arise::pipeline::kScenarioCategories[cat(rng)]);
    r.scenario_id = r.category + "_1";
    r.run_index = static_cast<int>(i);
    switch (kind(rng)) {
      case 0:  // first-attempt success
        r.success = r.first_attempt_success = true;
        break;
      case 1:  // repaired
        r.success = true;
        r.repair_attempts = repairs(rng);
        break;
      default:  // exhausted
        r.repair_attempts = 10;
        r.error_code = "trl.exhausted";
    }
    out.push_back(r);
  }
  return out;
}

struct Oracle {
  std::map<std::string, double> esr_single, esr_total;
  std::map<std::string, std::optional<double>> rcr;
};

inline Oracle brute_force(const std::vector<arise::metrics::RunRecord>& log) {
  Oracle o;
  std::vector<std::string> cats;
  for (const auto& r : log)
    if (std::find(cats.begin(), cats.end(), r.category) == cats.end()) cats.push_back(r.category);
  for (const auto& c : cats) {
    long total = 0, single = 0, success = 0, qualifying = 0, attempts = 0;
    for (const auto& r : log) {
      if (r.category != c) continue;
      ++total;
      if (r.first_attempt_success) ++single;
      if (r.success) ++success;
      if (r.success && r.repair_attempts >= 1) {
        ++qualifying;
        attempts += r.repair_attempts;
      }
    }
    o.esr_single[c] = static_cast<double>(single) / static_cast<double>(total);
    o.esr_total[c] = static_cast<double>(success) / static_cast<double>(total);
    if (qualifying > 0) o.rcr[c] = static_cast<double>(attempts) / static_cast<double>(qualifying);
    else o.rcr[c] = std::nullopt;
  }
  return o;
}

/// Textbook two-pass population variance, square-rooted.
inline double two_pass_std(const std::vector<double>& v) {
  long double sum = 0;
  for (double x : v) sum += x;
  long double m = sum / static_cast<long double>(v.size());
  long double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size())));
}

}  // namespace records
