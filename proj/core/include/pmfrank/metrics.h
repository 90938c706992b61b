#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pmfrank/types.h"

namespace pmfrank {

// DCG@K = sum_{i=1..K} (2^rel_i - 1) / log2(1 + i). Throws BoundsError
// unless 1 <= k <= rel.size().
double dcg_at_k(std::span<const int> rel, std::size_t k);

// DCG@K over the DCG@K of the relevance sorted descending. Unset when no
// item is relevant, since the ratio is then undefined.
std::optional<double> ndcg_at_k(std::span<const int> rel, std::size_t k);

// |a & b| / min(|a|, |b|); unset when either set is empty.
std::optional<double> overlap_score(const std::set<std::string>& a,
                                    const std::set<std::string>& b);

// Binary relevance (clicked = 1) of the session's items in the given order.
std::vector<int> relevance_in_order(const SessionRecord& session,
                                    std::span<const std::string> order);

// Mean nDCG@K for K = 1..k_max over the sessions that have at least one
// relevant item. k_max is the shortest included session length.
struct MetricReport {
  std::string method;
  std::vector<double> ndcg;       // ndcg[K-1]
  std::vector<double> std_error;  // across sessions
  std::size_t session_count = 0;
  std::size_t excluded_sessions = 0;
  std::vector<std::uint64_t> seeds;

  std::size_t k_max() const { return ndcg.size(); }
};

// ranked_relevance holds each session's relevance in the evaluated order.
MetricReport evaluate_rankings(const std::string& method,
                               std::span<const std::vector<int>> ranked_relevance);

// Expected nDCG under uniformly random orderings, estimated with `trials`
// permutations per session (at least 10). Session s draws from the stream
// derive_seed(seed, s).
MetricReport random_baseline(std::span<const std::vector<int>> relevance,
                             int trials, std::uint64_t seed);

}  // namespace pmfrank
