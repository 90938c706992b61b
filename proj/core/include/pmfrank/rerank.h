#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmfrank/choice_model.h"
#include "pmfrank/classifier.h"
#include "pmfrank/types.h"

namespace pmfrank {

enum class RerankMethod { kPmfp, kPmfs, kPmfl };

// kIncreasing uses 1/(1+exp(-S)) so higher classifier confidence scores
// higher. kDecreasing uses 1/(1+exp(S)), which is decreasing in S.
enum class SigmoidMode { kIncreasing, kDecreasing };

struct RerankConfig {
  RerankMethod method = RerankMethod::kPmfl;
  // Number of most-preferred types that contribute, 1..3.
  int rho = 3;
  SigmoidMode sigmoid_mode = SigmoidMode::kIncreasing;
};

struct RankedItem {
  std::string item_id;
  double score = 0.0;
  std::size_t original_position = 0;
};

// Items in non-increasing score order; equal scores keep display order.
struct RankedList {
  std::vector<RankedItem> items;

  std::vector<std::string> item_ids() const;
};

double logistic(double x, SigmoidMode mode);

// Type indices sorted by descending weight, ties by type order, truncated
// to rho entries.
std::vector<std::size_t> top_preferred_types(const WeightVector& omega, int rho);

// Attractiveness score of one item:
//   PMFS: sum over the top-rho types of omega_i * S_i
//   PMFP: sum over the top-rho types of omega_i * logistic(S_i)
//   PMFL: omega of the argmax type when it is among the top rho, else 0
// Throws NormalizationError unless omega is canonical with three entries.
double attractiveness_score(const ClassScores& scores, const WeightVector& omega,
                            const RerankConfig& cfg);

// Stable descending sort of the displayed items by attractiveness_score.
// Throws IncompleteInputError naming the first item without scores.
RankedList rerank(const SessionRecord& session,
                  const std::map<std::string, ClassScores>& scores,
                  const WeightVector& omega, const RerankConfig& cfg);

// Preference levels d in {1, 0, -1}.
enum class LevelRule {
  // Purchase-aware when the session records any purchase, click-only
  // otherwise.
  kAuto,
  // purchased -> 1, clicked only -> 0, unclicked -> -1
  kPurchaseAware,
  // clicked -> 1, unclicked -> -1
  kClickOnly,
};

std::vector<int> preference_levels(const SessionRecord& session, LevelRule rule);

struct PreferencePairs {
  // (higher, lower) with d_higher > d_lower.
  std::vector<std::pair<std::string, std::string>> ordered;
  // Pairs with equal levels, each listed once in display order.
  std::vector<std::pair<std::string, std::string>> unordered;
};

PreferencePairs make_preference_pairs(const SessionRecord& session,
                                      LevelRule rule = LevelRule::kAuto);

inline constexpr std::size_t kRankFeatureDim = 9;
using RankFeature = std::array<double, kRankFeatureDim>;

// One-hot predicted label, the three raw scores, then g(S) = 1/(1+exp(S))
// per score.
RankFeature ranksvm_features(const ClassScores& scores, DisplayType label);

struct FeaturePair {
  RankFeature higher{};
  RankFeature lower{};
};

// Looks up both items of every ordered pair. Throws IncompleteInputError.
std::vector<FeaturePair> collect_feature_pairs(
    const PreferencePairs& pairs,
    const std::map<std::string, RankFeature>& features);

struct RankSvmConfig {
  double c = 1.0;
  double tolerance = 1e-4;
  int max_epochs = 5000;
  std::uint64_t seed = 0;
};

struct RankModel {
  RankFeature weights{};
  double c = 1.0;
  std::string layout = "onehot3+score3+g3";
  // Solver diagnostics; not serialized.
  std::vector<double> dual_objective;
  double primal_objective = 0.0;
};

// Minimizes 1/2 |w|^2 + C sum max(0, 1 - <w, higher - lower>).
// Throws NoPairsError on an empty pair list.
RankModel ranksvm_train(std::span<const FeaturePair> pairs,
                        const RankSvmConfig& cfg);

double ranksvm_score(const RankModel& model, const RankFeature& feature);

// Stable descending sort by <w, feature>.
RankedList ranksvm_rerank(const SessionRecord& session, const RankModel& model,
                          const std::map<std::string, RankFeature>& features);

}  // namespace pmfrank
