#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmfrank/kernel.h"
#include "pmfrank/types.h"

namespace pmfrank {

struct TrainConfig {
  // Lambda in lambda/2 |w|^2 + mean hinge loss. Unset means 1 / N.
  std::optional<double> regularization;
  double tolerance = 1e-3;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
  // Training positives drawn per class by split_per_class.
  std::size_t positives_per_class = 450;
};

// Stable fingerprint of every field of the config.
std::string config_hash(const TrainConfig& cfg);

// Per-type decision values S_p, S_m, S_f. Larger means more confident.
struct ClassScores {
  PerType<double> values{};

  double operator[](DisplayType type) const { return values[type_index(type)]; }
  double operator[](std::size_t index) const { return values[index]; }
};

struct TrainingTrace {
  PerType<std::vector<double>> dual_objective;
  PerType<double> primal_objective{};
  PerType<int> epochs{};
  PerType<bool> converged{};
};

// One-vs-all linear model over mapped features.
struct LinearModel {
  std::size_t dimension = 0;
  PerType<std::vector<double>> weights;
  PerType<double> bias{};
  std::string config_hash;
  std::uint64_t seed = 0;
  // Feature map the model was trained behind. Carried for serialization;
  // score() expects features already mapped.
  KernelMapConfig kernel;
  // Solver diagnostics; not serialized.
  TrainingTrace trace;
};

// Trains one hinge-loss classifier per display type (that type positive,
// every other training example negative). A type with no examples still
// gets a model, trained on negatives only.
// Throws ShapeError, UnresolvedTypeError, or DegenerateTrainingError when
// fewer than two distinct labels are present.
LinearModel train_ova(std::span<const MappedFeature> features,
                      std::span<const DisplayType> labels,
                      const TrainConfig& cfg);

ClassScores score(const LinearModel& model, const MappedFeature& feature);

// argmax over types; exact ties go to Person, then Mannequin, then Flat.
DisplayType argmax_type(const ClassScores& scores);

DisplayType predict(const LinearModel& model, const MappedFeature& feature);

// Fraction of predictions equal to labels. Throws EmptyEvaluationError on
// empty input and ShapeError on a length mismatch.
double evaluate_accuracy(const LinearModel& model,
                         std::span<const MappedFeature> features,
                         std::span<const DisplayType> labels);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per type, min(positives_per_class, available) examples chosen uniformly
// under seed go to train and the rest to test. Unknown labels are dropped.
// Both index lists are ascending.
TrainTestSplit split_per_class(std::span<const DisplayType> labels,
                               std::size_t positives_per_class,
                               std::uint64_t seed);

}  // namespace pmfrank
