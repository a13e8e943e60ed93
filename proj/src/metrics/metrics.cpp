#include "arise/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "arise/error.hpp"
#include "arise/pipeline/scenario.hpp"
#include "arise/util/text.hpp"

namespace arise::metrics {

namespace {

std::vector<std::string> resolve(const std::vector<RunRecord>& records, std::vector<std::string> categories) {
  return categories.empty() ? categories_of(records) : categories;
}

std::string pct(double rate) { return util::fixed(rate * 100.0, 2) + "%"; }

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string row(const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "  " : "") + pad(cells[i], widths[i]);
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out + "\n";
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) widths[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
  std::string out = row(header, widths);
  std::vector<std::string> rule;
  for (auto w : widths) rule.emplace_back(w, '-');
  out += row(rule, widths);
  for (const auto& r : rows) out += row(r, widths);
  return out;
}

}  // namespace

void check(const RunRecord& r) {
  if (r.repair_attempts < 0) throw Error("metrics.bad_record", r.scenario_id + ": negative repair count");
  if (r.first_attempt_success && (r.repair_attempts != 0 || !r.success))
    throw Error("metrics.bad_record", r.scenario_id + ": first-attempt success must have zero repairs");
  if (r.success && !r.first_attempt_success && r.repair_attempts < 1)
    throw Error("metrics.bad_record", r.scenario_id + ": repaired success needs at least one repair");
}

std::vector<std::string> categories_of(const std::vector<RunRecord>& records) {
  std::set<std::string> present;
  for (const auto& r : records) present.insert(r.category);
  std::vector<std::string> out;
  for (auto c : pipeline::kScenarioCategories)
    if (present.erase(std::string(c))) out.emplace_back(c);
  out.insert(out.end(), present.begin(), present.end());
  return out;
}

EsrResult esr(const std::vector<RunRecord>& records, EsrMode mode, std::vector<std::string> categories) {
  categories = resolve(records, std::move(categories));
  if (categories.empty()) throw Error("metrics.empty_category", "no records");
  EsrResult out;
  for (const auto& c : categories) {
    std::size_t total = 0, ok = 0;
    for (const auto& r : records) {
      if (r.category != c) continue;
      ++total;
      if (mode == EsrMode::total ? r.success : r.first_attempt_success) ++ok;
    }
    if (total == 0) throw Error("metrics.empty_category", "category '" + c + "' has no records");
    out.per_category[c] = static_cast<double>(ok) / static_cast<double>(total);
  }
  double sum = 0;
  for (const auto& c : categories) sum += out.per_category[c];
  out.average = sum / static_cast<double>(categories.size());
  return out;
}

RcrResult rcr(const std::vector<RunRecord>& records, std::vector<std::string> categories) {
  categories = resolve(records, std::move(categories));
  RcrResult out;
  double sum_defined = 0;
  std::size_t defined = 0;
  for (const auto& c : categories) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& r : records) {
      if (r.category != c || !r.success || r.first_attempt_success || r.repair_attempts < 1) continue;
      sum += r.repair_attempts;
      ++n;
    }
    if (n == 0) {
      out.per_category[c] = std::nullopt;
      continue;
    }
    double v = sum / static_cast<double>(n);
    out.per_category[c] = v;
    sum_defined += v;
    ++defined;
  }
  if (defined > 0) out.average = sum_defined / static_cast<double>(defined);
  return out;
}

double scs(const std::vector<int>& scores) {
  if (scores.size() != static_cast<std::size_t>(kCriteriaCount))
    throw Error("metrics.bad_criteria_count", "expected " + std::to_string(kCriteriaCount) + " scores, got " +
                                                  std::to_string(scores.size()));
  int sum = 0;
  for (int s : scores) {
    if (s < 0 || s > kMaxCriterionScore)
      throw Error("metrics.bad_score_range", "score " + std::to_string(s) + " outside [0, 10]");
    sum += s;
  }
  return static_cast<double>(sum) / static_cast<double>(kMaxCriterionScore * kCriteriaCount);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0;
  double sum = 0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double population_std(const std::vector<double>& values) {
  if (values.empty()) return 0;
  double m = mean(values);
  double ss = 0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

MetricsReport report(const std::vector<RunRecord>& records, const std::map<std::string, std::vector<double>>& scs_percents) {
  MetricsReport r;
  r.categories = categories_of(records);
  if (!r.categories.empty()) {
    r.esr_single = esr(records, EsrMode::single, r.categories);
    r.esr_total = esr(records, EsrMode::total, r.categories);
    r.rcr = rcr(records, r.categories);
  }
  for (const auto& [category, values] : scs_percents) {
    if (values.empty()) continue;
    ScsStats s;
    s.n = values.size();
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = mean(values);
    s.std_pp = population_std(values);
    r.scs[category] = s;
  }
  return r;
}

std::string render(const MetricsReport& r) {
  std::string out;
  if (!r.categories.empty()) {
    out += "Execution success and repair convergence\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : r.categories) {
      auto rc = r.rcr.per_category.at(c);
      rows.push_back({c, pct(r.esr_single.per_category.at(c)), pct(r.esr_total.per_category.at(c)),
                      rc ? util::fixed(*rc, 2) : "N/A"});
    }
    rows.push_back({"average", pct(r.esr_single.average), pct(r.esr_total.average),
                    r.rcr.average ? util::fixed(*r.rcr.average, 2) : "N/A"});
    out += table({"category", "ESR single", "ESR total", "RCR"}, rows);
  }
  if (!r.scs.empty()) {
    if (!out.empty()) out += "\n";
    out += "Semantic conformity (SCS, %)\n\n";
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> order = r.categories;
    for (const auto& [c, s] : r.scs)
      if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
    for (const auto& c : order) {
      auto it = r.scs.find(c);
      if (it == r.scs.end()) continue;
      const auto& s = it->second;
      rows.push_back({c, util::fixed(s.min, 2), util::fixed(s.max, 2), util::fixed(s.mean, 2), util::fixed(s.std_pp, 2),
                      std::to_string(s.n)});
    }
    out += table({"category", "min", "max", "avg", "std (pp)", "n"}, rows);
  }
  return out;
}

std::string render_json(const MetricsReport& r) {
  using nlohmann::json;
  json j = json::object();
  json cats = json::array();
  for (const auto& c : r.categories) {
    auto rc = r.rcr.per_category.at(c);
    cats.push_back({{"category", c},
                    {"esr_single", r.esr_single.per_category.at(c)},
                    {"esr_total", r.esr_total.per_category.at(c)},
                    {"rcr", rc ? json(*rc) : json(nullptr)}});
  }
  j["categories"] = cats;
  if (!r.categories.empty()) {
    j["average"] = {{"esr_single", r.esr_single.average},
                    {"esr_total", r.esr_total.average},
                    {"rcr", r.rcr.average ? json(*r.rcr.average) : json(nullptr)}};
  }
  if (!r.scs.empty()) {
    json scs = json::object();
    for (const auto& [c, s] : r.scs)
      scs[c] = {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"std_pp", s.std_pp}, {"n", s.n}};
    j["scs"] = scs;
  }
  return j.dump(2) + "\n";
}

}  // namespace arise::metrics
