#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmfrank/choice_model.h"
#include "pmfrank/types.h"

namespace pmfrank {

// Number of clicks per session.
struct ClickLaw {
  enum class Kind { kFixed, kTruncatedPoisson };
  Kind kind = Kind::kFixed;
  int fixed = 2;
  // Poisson rate, truncated to [1, session size].
  double lambda = 2.0;

  static ClickLaw fixed_count(int k) { return {Kind::kFixed, k, 0.0}; }
  static ClickLaw truncated_poisson(double lambda) {
    return {Kind::kTruncatedPoisson, 0, lambda};
  }
};

// Per-type Dirichlet concentrations for synthetic bag-of-words histograms.
struct FeatureSpec {
  PerType<std::vector<double>> concentrations;
  std::size_t samples_per_type = 600;

  std::size_t dimension() const { return concentrations[0].size(); }
};

// Type t concentrates `dominant` on its own third of the bins and
// `background` elsewhere, so the three types are easy to separate.
FeatureSpec well_separated_features(std::size_t dimension = 60,
                                    double dominant = 2.0,
                                    double background = 0.1);

// The same concentration for every type; the types are indistinguishable.
FeatureSpec identical_features(std::size_t dimension = 60,
                               double concentration = 0.5);

struct SimConfig {
  std::size_t n_sessions = 484;
  PerType<int> per_type_counts = {3, 3, 3};
  ClickLaw clicks = ClickLaw::fixed_count(2);
  WeightVector true_omega{{1.0, 1.0, 1.0}};
  std::uint64_t seed = 0;
  // When set, simulate_sessions also draws a histogram for every item.
  std::optional<FeatureSpec> features;
};

// Throws ConfigError on an invalid config.
void check_sim_config(const SimConfig& cfg);

// Sessions drawn from the choice model. Each session shows per_type_counts
// items in a uniformly shuffled order, draws the click total from the click
// law, the per-type click counts from the Fisher urn with true_omega, and
// places clicks uniformly within each type. Session i uses the stream
// derive_seed(seed, i), so output never depends on generation order.
//
// Item ids are "s<session>-<slot>". Price, seller class, watch count and
// sold flag are synthetic fillers; purchases are the clicked items that
// sold.
Dataset simulate_sessions(const SimConfig& cfg);

struct LabeledFeatures {
  std::vector<BowHistogram> histograms;
  std::vector<DisplayType> labels;
};

// feature_spec.samples_per_type histograms per type, grouped by type in
// Person, Mannequin, Flat order. Throws ConfigError if features is unset or
// a concentration is not positive.
LabeledFeatures simulate_features(const SimConfig& cfg);

// Items "<prefix><index>" carrying the labels, with matching histograms.
Dataset labeled_features_dataset(const LabeledFeatures& features,
                                 const std::string& prefix);

}  // namespace pmfrank
