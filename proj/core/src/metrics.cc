#include "pmfrank/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pmfrank/errors.h"
#include "pmfrank/rng.h"

namespace pmfrank {

double dcg_at_k(std::span<const int> rel, std::size_t k) {
  if (k < 1 || k > rel.size()) {
    throw BoundsError("DCG cutoff " + std::to_string(k) + " outside [1, " +
                      std::to_string(rel.size()) + "]");
  }
  double dcg = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (rel[i] < 0) throw DomainError("relevance must be nonnegative");
    dcg += (std::exp2(rel[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

std::optional<double> ndcg_at_k(std::span<const int> rel, std::size_t k) {
  std::vector<int> ideal(rel.begin(), rel.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg_at_k(ideal, k);
  if (idcg == 0.0) return std::nullopt;
  return dcg_at_k(rel, k) / idcg;
}

std::optional<double> overlap_score(const std::set<std::string>& a,
                                    const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  std::size_t common = 0;
  for (const std::string& x : a) common += b.count(x);
  return static_cast<double>(common) /
         static_cast<double>(std::min(a.size(), b.size()));
}

std::vector<int> relevance_in_order(const SessionRecord& session,
                                    std::span<const std::string> order) {
  const std::set<std::string> clicked(session.clicked.begin(), session.clicked.end());
  std::vector<int> rel;
  rel.reserve(order.size());
  for (const std::string& id : order) rel.push_back(clicked.contains(id) ? 1 : 0);
  return rel;
}

namespace {

bool has_relevant(const std::vector<int>& rel) {
  return std::any_of(rel.begin(), rel.end(), [](int r) { return r > 0; });
}

std::size_t shortest_included(std::span<const std::vector<int>> sessions) {
  std::size_t k_max = 0;
  bool first = true;
  for (const auto& rel : sessions) {
    if (!has_relevant(rel)) continue;
    k_max = first ? rel.size() : std::min(k_max, rel.size());
    first = false;
  }
  return k_max;
}

// Fills mean and standard error from per-session nDCG rows.
void summarize(const std::vector<std::vector<double>>& rows, std::size_t k_max,
               MetricReport& report) {
  report.ndcg.assign(k_max, 0.0);
  report.std_error.assign(k_max, 0.0);
  const double n = static_cast<double>(rows.size());
  if (rows.empty()) return;
  for (std::size_t k = 0; k < k_max; ++k) {
    double sum = 0.0;
    for (const auto& row : rows) sum += row[k];
    const double m = sum / n;
    double ss = 0.0;
    for (const auto& row : rows) ss += (row[k] - m) * (row[k] - m);
    report.ndcg[k] = m;
    report.std_error[k] = rows.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
}

}  // namespace

MetricReport evaluate_rankings(const std::string& method,
                               std::span<const std::vector<int>> ranked_relevance) {
  MetricReport report;
  report.method = method;
  const std::size_t k_max = shortest_included(ranked_relevance);
  std::vector<std::vector<double>> rows;
  for (const auto& rel : ranked_relevance) {
    if (!has_relevant(rel)) {
      ++report.excluded_sessions;
      continue;
    }
    std::vector<double> row(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) row[k - 1] = *ndcg_at_k(rel, k);
    rows.push_back(std::move(row));
  }
  report.session_count = rows.size();
  summarize(rows, k_max, report);
  return report;
}

MetricReport random_baseline(std::span<const std::vector<int>> relevance,
                             int trials, std::uint64_t seed) {
  if (trials < 10) {
    throw DomainError("random baseline needs at least 10 trials, got " +
                      std::to_string(trials));
  }
  MetricReport report;
  report.method = "random";
  report.seeds = {seed};
  const std::size_t k_max = shortest_included(relevance);
  std::vector<std::vector<double>> rows;
  for (std::size_t s = 0; s < relevance.size(); ++s) {
    const std::vector<int>& rel = relevance[s];
    if (!has_relevant(rel)) {
      ++report.excluded_sessions;
      continue;
    }
    Rng rng(derive_seed(seed, s));
    std::vector<double> row(k_max, 0.0);
    std::vector<int> perm = rel;
    for (int t = 0; t < trials; ++t) {
      shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t k = 1; k <= k_max; ++k) row[k - 1] += *ndcg_at_k(perm, k);
    }
    for (double& v : row) v /= trials;
    rows.push_back(std::move(row));
  }
  report.session_count = rows.size();
  summarize(rows, k_max, report);
  return report;
}

}  // namespace pmfrank
