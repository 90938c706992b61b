#include "pmfrank/classifier.h"

#include <algorithm>
#include <cstdio>
#include <set>

#include "linear_svm.h"
#include "pmfrank/errors.h"
#include "pmfrank/hash.h"
#include "pmfrank/rng.h"

namespace pmfrank {

std::string config_hash(const TrainConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "lambda=%.17g;tolerance=%.17g;max_epochs=%d;seed=%llu;ppc=%zu",
                cfg.regularization.value_or(-1.0), cfg.tolerance, cfg.max_epochs,
                static_cast<unsigned long long>(cfg.seed),
                cfg.positives_per_class);
  return fnv1a64_hex(buf);
}

LinearModel train_ova(std::span<const MappedFeature> features,
                      std::span<const DisplayType> labels,
                      const TrainConfig& cfg) {
  if (features.size() != labels.size()) {
    throw ShapeError("train_ova: " + std::to_string(features.size()) +
                     " features but " + std::to_string(labels.size()) +
                     " labels");
  }
  if (!(cfg.tolerance > 0.0)) throw DomainError("train_ova: tolerance must be positive");
  if (cfg.max_epochs <= 0) throw DomainError("train_ova: max_epochs must be positive");
  if (cfg.regularization && !(*cfg.regularization > 0.0)) {
    throw DomainError("train_ova: regularization must be positive");
  }
  std::set<std::size_t> distinct;
  for (DisplayType label : labels) distinct.insert(type_index(label));
  if (distinct.size() < 2) {
    throw DegenerateTrainingError(
        "train_ova: need at least two distinct labels, got " +
        std::to_string(distinct.size()));
  }
  const std::size_t dim = features.front().dimension();
  for (const MappedFeature& f : features) {
    if (f.dimension() != dim) throw ShapeError("train_ova: feature dimensions differ");
  }

  const double n = static_cast<double>(features.size());
  const double lambda = cfg.regularization.value_or(1.0 / n);

  detail::HingeProblem problem;
  problem.cost = 1.0 / (lambda * n);
  problem.bias = true;
  problem.rows.reserve(features.size());
  for (const MappedFeature& f : features) problem.rows.emplace_back(f.values);

  LinearModel model;
  model.dimension = dim;
  model.seed = cfg.seed;
  model.config_hash = config_hash(cfg);
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    problem.labels.assign(labels.size(), -1.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (type_index(labels[i]) == t) problem.labels[i] = 1.0;
    }
    detail::HingeOptions options{cfg.tolerance, cfg.max_epochs,
                                 derive_seed(cfg.seed, t)};
    detail::HingeSolution sol = detail::solve_hinge(problem, options);
    model.weights[t] = std::move(sol.weights);
    model.bias[t] = sol.bias;
    model.trace.dual_objective[t] = std::move(sol.dual_objective);
    model.trace.primal_objective[t] = sol.primal_objective;
    model.trace.epochs[t] = sol.epochs;
    model.trace.converged[t] = sol.converged;
  }
  return model;
}

ClassScores score(const LinearModel& model, const MappedFeature& feature) {
  if (feature.dimension() != model.dimension) {
    throw ShapeError("score: feature dimension " +
                     std::to_string(feature.dimension()) +
                     " does not match model dimension " +
                     std::to_string(model.dimension));
  }
  ClassScores out;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    double s = model.bias[t];
    const std::vector<double>& w = model.weights[t];
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * feature.values[j];
    out.values[t] = s;
  }
  return out;
}

DisplayType argmax_type(const ClassScores& scores) {
  std::size_t best = 0;
  for (std::size_t t = 1; t < kNumDisplayTypes; ++t) {
    if (scores.values[t] > scores.values[best]) best = t;
  }
  return kDisplayTypes[best];
}

DisplayType predict(const LinearModel& model, const MappedFeature& feature) {
  return argmax_type(score(model, feature));
}

double evaluate_accuracy(const LinearModel& model,
                         std::span<const MappedFeature> features,
                         std::span<const DisplayType> labels) {
  if (features.size() != labels.size()) {
    throw ShapeError("evaluate_accuracy: length mismatch");
  }
  if (features.empty()) {
    throw EmptyEvaluationError("evaluate_accuracy: no examples");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (predict(model, features[i]) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(features.size());
}

TrainTestSplit split_per_class(std::span<const DisplayType> labels,
                               std::size_t positives_per_class,
                               std::uint64_t seed) {
  TrainTestSplit split;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == kDisplayTypes[t]) pool.push_back(i);
    }
    Rng rng(derive_seed(seed, t));
    shuffle(pool.begin(), pool.end(), rng);
    const std::size_t take = std::min(pool.size(), positives_per_class);
    split.train.insert(split.train.end(), pool.begin(), pool.begin() + take);
    split.test.insert(split.test.end(), pool.begin() + take, pool.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace pmfrank
