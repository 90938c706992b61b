#include "pmfrank/sim.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pmfrank/classifier.h"
#include "pmfrank/errors.h"
#include "pmfrank/kernel.h"
#include "pmfrank/pipeline.h"
#include "pmfrank/validate.h"
#include "support/oracles.h"

namespace pmfrank {
namespace {

SimConfig small_config(std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.n_sessions = 200;
  cfg.true_omega = WeightVector{{1.0, 0.5, 0.25}};
  cfg.seed = seed;
  return cfg;
}

TEST(Simulate, ProducesValidDatasets) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SimConfig cfg = small_config(seed);
    cfg.clicks = ClickLaw::truncated_poisson(2.5);
    cfg.features = well_separated_features(12);
    const Dataset d = simulate_sessions(cfg);
    EXPECT_TRUE(validate(d).ok()) << seed;
    EXPECT_EQ(d.sessions.size(), cfg.n_sessions);
    EXPECT_EQ(d.items.size(), cfg.n_sessions * 9);
    EXPECT_EQ(d.features.size(), d.items.size());
  }
}

TEST(Simulate, DeterministicInSeed) {
  const Dataset a = simulate_sessions(small_config(4));
  const Dataset b = simulate_sessions(small_config(4));
  const Dataset c = simulate_sessions(small_config(5));
  ASSERT_EQ(a.sessions.size(), b.sessions.size());
  for (std::size_t i = 0; i < a.sessions.size(); ++i) {
    EXPECT_EQ(a.sessions[i].displayed, b.sessions[i].displayed);
    EXPECT_EQ(a.sessions[i].clicked, b.sessions[i].clicked);
  }
  bool differs = false;
  for (std::size_t i = 0; i < a.sessions.size(); ++i) {
    differs = differs || a.sessions[i].clicked != c.sessions[i].clicked;
  }
  EXPECT_TRUE(differs);
}

TEST(Simulate, SessionStreamsIndependentOfCount) {
  SimConfig shorter = small_config(8);
  shorter.n_sessions = 20;
  const Dataset a = simulate_sessions(shorter);
  const Dataset b = simulate_sessions(small_config(8));
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(a.sessions[i].clicked, b.sessions[i].clicked);
  }
}

TEST(Simulate, FixedClicksAndPerTypeCounts) {
  SimConfig cfg = small_config();
  cfg.per_type_counts = {2, 4, 1};
  cfg.clicks = ClickLaw::fixed_count(3);
  const Dataset d = simulate_sessions(cfg);
  for (const Observation& o : observations_from_dataset(d)) {
    EXPECT_EQ(o.urn.gamma, (std::vector<int>{2, 4, 1}));
    EXPECT_EQ(o.urn.n_hat, 3);
  }
}

TEST(Simulate, ClickedTypeMeansMatchModel) {
  SimConfig cfg = small_config(2);
  cfg.n_sessions = 4000;
  const Dataset d = simulate_sessions(cfg);
  const ObservationSet obs = observations_from_dataset(d);
  const std::vector<double> expected = testing::fisher_mean({3, 3, 3}, 2, cfg.true_omega.omega);
  for (std::size_t t = 0; t < 3; ++t) {
    double sum = 0, sq = 0;
    for (const Observation& o : obs) {
      sum += o.eta[t];
      sq += o.eta[t] * o.eta[t];
    }
    const double n = static_cast<double>(obs.size());
    const double m = sum / n;
    const double se = std::sqrt((sq / n - m * m) / n);
    EXPECT_NEAR(m, expected[t], 4 * se) << t;
  }
}

TEST(Simulate, EqualWeightsAreSymmetric) {
  SimConfig cfg = small_config(3);
  cfg.n_sessions = 3000;
  cfg.true_omega = WeightVector{{1, 1, 1}};
  const ObservationSet obs = observations_from_dataset(simulate_sessions(cfg));
  PerType<double> totals{};
  for (const Observation& o : obs) {
    for (std::size_t t = 0; t < 3; ++t) totals[t] += o.eta[t];
  }
  const double share = 1.0 / 3.0;
  const double n = 2.0 * static_cast<double>(obs.size());
  for (double total : totals) {
    EXPECT_NEAR(total / n, share, 4 * std::sqrt(share * (1 - share) / n));
  }
}

TEST(Simulate, DisplayPositionUniformPerType) {
  SimConfig cfg = small_config(6);
  cfg.n_sessions = 3000;
  const Dataset d = simulate_sessions(cfg);
  const ItemIndex index = build_item_index(d);
  std::size_t person_first = 0;
  for (const SessionRecord& s : d.sessions) {
    const ItemRecord& first = d.items[index.at(s.displayed.front())];
    if (first.display_type == DisplayType::kPerson) ++person_first;
  }
  const double n = static_cast<double>(d.sessions.size());
  EXPECT_NEAR(person_first / n, 1.0 / 3.0, 4 * std::sqrt(2.0 / 9.0 / n));
}

TEST(Simulate, MeanDisplayPositionPerTypeIsCentral) {
  SimConfig cfg = small_config(9);
  cfg.n_sessions = 2000;
  const Dataset d = simulate_sessions(cfg);
  const ItemIndex index = build_item_index(d);
  PerType<double> sum{}, sq{};
  PerType<std::size_t> n{};
  for (const SessionRecord& s : d.sessions) {
    for (std::size_t pos = 0; pos < s.displayed.size(); ++pos) {
      const auto t = static_cast<std::size_t>(d.items[index.at(s.displayed[pos])].display_type);
      const double p = static_cast<double>(pos + 1);
      sum[t] += p;
      sq[t] += p * p;
      ++n[t];
    }
  }
  for (std::size_t t = 0; t < 3; ++t) {
    const double m = sum[t] / n[t];
    const double se = std::sqrt((sq[t] / n[t] - m * m) / n[t]);
    EXPECT_NEAR(m, 5.0, 3 * se) << t;
  }
}

TEST(Simulate, PurchasesAreClickedAndSold) {
  const Dataset d = simulate_sessions(small_config());
  const ItemIndex index = build_item_index(d);
  for (const SessionRecord& s : d.sessions) {
    for (const auto& id : s.purchased) {
      EXPECT_TRUE(d.items[index.at(id)].sold);
    }
    for (const auto& id : s.clicked) {
      const bool bought =
          std::find(s.purchased.begin(), s.purchased.end(), id) != s.purchased.end();
      EXPECT_EQ(bought, d.items[index.at(id)].sold);
    }
  }
}

TEST(SimConfigCheck, RejectsInvalid) {
  SimConfig cfg = small_config();
  cfg.clicks = ClickLaw::fixed_count(10);
  EXPECT_THROW(check_sim_config(cfg), ConfigError);
  cfg = small_config();
  cfg.per_type_counts = {-1, 3, 3};
  EXPECT_THROW(check_sim_config(cfg), ConfigError);
  cfg = small_config();
  cfg.true_omega = WeightVector{{1.0, 0.0, 1.0}};
  EXPECT_THROW(check_sim_config(cfg), ConfigError);
  cfg = small_config();
  cfg.clicks = ClickLaw::truncated_poisson(-1);
  EXPECT_THROW(check_sim_config(cfg), ConfigError);
  cfg = small_config();
  EXPECT_THROW(simulate_features(cfg), ConfigError);
  EXPECT_NO_THROW(check_sim_config(small_config()));
}

TEST(SimulateFeatures, LayoutAndNormalization) {
  SimConfig cfg = small_config();
  cfg.features = well_separated_features(30);
  cfg.features->samples_per_type = 10;
  const LabeledFeatures f = simulate_features(cfg);
  ASSERT_EQ(f.histograms.size(), 30u);
  EXPECT_EQ(f.labels[0], DisplayType::kPerson);
  EXPECT_EQ(f.labels[10], DisplayType::kMannequin);
  EXPECT_EQ(f.labels[29], DisplayType::kFlat);
  for (const BowHistogram& h : f.histograms) {
    EXPECT_EQ(h.dimension(), 30u);
    EXPECT_NEAR(h.mass(), 1.0, 1e-9);
  }
  const Dataset d = labeled_features_dataset(f, "x");
  EXPECT_TRUE(validate(d).ok());
  EXPECT_EQ(d.items[3].item_id, "x000003");
}

TEST(SimulateFeatures, SeparatedTypesAreLearnable) {
  SimConfig cfg = small_config();
  cfg.features = well_separated_features(30);
  cfg.features->samples_per_type = 100;
  const LabeledFeatures f = simulate_features(cfg);
  std::vector<MappedFeature> mapped;
  for (const auto& h : f.histograms) mapped.push_back(approx_map(h, KernelMapConfig{}));
  const TrainTestSplit split = split_per_class(f.labels, 70, 0);
  std::vector<MappedFeature> xtr, xte;
  std::vector<DisplayType> ytr, yte;
  for (auto i : split.train) {
    xtr.push_back(mapped[i]);
    ytr.push_back(f.labels[i]);
  }
  for (auto i : split.test) {
    xte.push_back(mapped[i]);
    yte.push_back(f.labels[i]);
  }
  const LinearModel m = train_ova(xtr, ytr, TrainConfig{});
  EXPECT_GE(evaluate_accuracy(m, xte, yte), 0.9);
}

}  // namespace
}  // namespace pmfrank
