#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmfrank/choice_model.h"
#include "pmfrank/classifier.h"
#include "pmfrank/metrics.h"
#include "pmfrank/rerank.h"
#include "pmfrank/types.h"

namespace pmfrank {

// One urn observation per session: gamma counts displayed items per type,
// eta counts clicked items per type. Throws UnresolvedTypeError when a
// displayed item has no resolved type.
ObservationSet observations_from_dataset(const Dataset& dataset);
ObservationSet observations_from_dataset(const Dataset& dataset,
                                         std::span<const std::size_t> sessions);

// One-hot scores from the resolved display types; Unknown items are skipped.
std::map<std::string, ClassScores> label_scores(const Dataset& dataset);

// Classifier scores for every item that has a histogram.
std::map<std::string, ClassScores> classify_items(const Dataset& dataset,
                                                  const LinearModel& model);

// rankSVM features per scored item. The one-hot part uses the resolved
// display type, or the argmax of the scores for Unknown items.
std::map<std::string, RankFeature> rank_features(
    const Dataset& dataset, const std::map<std::string, ClassScores>& scores);

struct SessionSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Shuffles session indices under seed; the first round(fraction * count)
// go to train. Both halves come back sorted. Throws ConfigError unless
// 0 < fraction < 1.
SessionSplit split_sessions(std::size_t count, double train_fraction,
                            std::uint64_t seed);

struct ComparisonOptions {
  int rho = 3;
  SigmoidMode sigmoid_mode = SigmoidMode::kIncreasing;
  int random_trials = 10;
  std::uint64_t random_seed = 0;
};

// nDCG reports on the given sessions, in the order PMFP^rho, PMFS^rho,
// PMFL, rankSVM (only when a rank model is given), random.
std::vector<MetricReport> compare_methods(
    const Dataset& dataset, const std::map<std::string, ClassScores>& scores,
    std::span<const std::size_t> sessions, const WeightVector& omega,
    const std::optional<RankModel>& rank_model, const ComparisonOptions& options);

// Where rankSVM draws ordered pairs from: within each training session, or
// across every item of every training session.
enum class PairPool { kSession, kGlobal };

// Ordered feature pairs from the given sessions.
std::vector<FeaturePair> training_pairs(const Dataset& dataset,
                                        std::span<const std::size_t> sessions,
                                        const std::map<std::string, RankFeature>& features,
                                        LevelRule rule, PairPool pool);

struct ProtocolOptions {
  double train_fraction = 0.75;
  std::uint64_t split_seed = 0;
  EstimationMethod estimation = EstimationMethod::kExactMle;
  LevelRule level_rule = LevelRule::kAuto;
  PairPool pair_pool = PairPool::kSession;
  RankSvmConfig ranksvm;
  ComparisonOptions comparison;
};

struct ProtocolResult {
  SessionSplit split;
  EstimationResult weights;
  RankModel rank_model;
  std::vector<MetricReport> reports;
};

// Splits sessions, estimates odds and trains rankSVM on the training part,
// then compares every method on the held-out part.
ProtocolResult run_protocol(const Dataset& dataset,
                            const std::map<std::string, ClassScores>& scores,
                            const ProtocolOptions& options);

}  // namespace pmfrank
