#include "pmfrank/features.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pmfrank/errors.h"
#include "pmfrank/image.h"

namespace pmfrank {
namespace {

GrayImage constant_image(int w, int h, double v) {
  return GrayImage(w, h, std::vector<double>(static_cast<std::size_t>(w) * h, v));
}

// Dark for x < edge, bright from edge on.
GrayImage vertical_edge(int w, int h, int edge) {
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) px[static_cast<std::size_t>(y) * w + x] = x < edge ? 0.0 : 1.0;
  }
  return GrayImage(w, h, px);
}

Descriptor unit_descriptor(std::vector<double> head) {
  Descriptor d;
  d.values = std::move(head);
  return d;
}

TEST(DenseDescriptorsTest, ConstantImageGivesZeroDescriptors) {
  const DescriptorSet set = dense_descriptors(constant_image(40, 40, 0.3));
  ASSERT_GT(set.size(), 0u);
  EXPECT_EQ(set.nonzero_count(), 0u);
  for (const auto& d : set.descriptors) EXPECT_EQ(d.values.size(), kDescriptorDim);
}

TEST(DenseDescriptorsTest, AtLeastOnePerScaleOnCoarseGrid) {
  DenseDescriptorConfig cfg;
  cfg.bin_sizes = {2, 3, 4};
  const int w = 16 * 4;
  cfg.step = w;
  const DescriptorSet set = dense_descriptors(constant_image(w, w, 0.5), cfg);
  for (int scale : cfg.bin_sizes) {
    EXPECT_GE(std::count_if(set.descriptors.begin(), set.descriptors.end(),
                            [&](const Descriptor& d) { return d.scale == scale; }),
              1);
  }
}

TEST(DenseDescriptorsTest, GridCountMatchesFormula) {
  DenseDescriptorConfig cfg;
  const int w = 50, h = 41;
  const DescriptorSet set = dense_descriptors(constant_image(w, h, 0.1), cfg);
  std::size_t expected = 0;
  for (int cell : cfg.bin_sizes) {
    const int side = 4 * cell;
    expected += static_cast<std::size_t>((w - side) / cfg.step + 1) *
                static_cast<std::size_t>((h - side) / cfg.step + 1);
  }
  EXPECT_EQ(set.size(), expected);
}

TEST(DenseDescriptorsTest, TooSmallImageNamesScale) {
  DenseDescriptorConfig cfg;
  cfg.bin_sizes = {4, 6, 9};
  try {
    dense_descriptors(constant_image(32, 32, 0.0), cfg);
    FAIL();
  } catch (const SizingError& e) {
    EXPECT_NE(std::string(e.what()).find("bin size 9"), std::string::npos);
  }
}

// Hand computation: with the edge at x = 16 and a cell of 4, the patch at
// x0 = 8 covers columns 8..23. Central differences are nonzero only at
// columns 15 and 16 (gx = 0.5, gy = 0, orientation 0), which fall in
// spatial columns 1 and 2. Each of those 8 cells collects 4 * 0.5 = 2 in
// orientation bin 0, so after L2 normalization each holds 1 / sqrt(8).
TEST(DenseDescriptorsTest, VerticalEdgeHandComputed) {
  DenseDescriptorConfig cfg;
  cfg.bin_sizes = {4, 4, 4};
  const DescriptorSet set = dense_descriptors(vertical_edge(32, 32, 16), cfg);
  const Descriptor* patch = nullptr;
  for (const auto& d : set.descriptors) {
    if (d.x == 8 + 8 && d.y == 8 + 8) patch = &d;
  }
  ASSERT_NE(patch, nullptr);
  for (int cy = 0; cy < 4; ++cy) {
    for (int cx = 0; cx < 4; ++cx) {
      for (int o = 0; o < 8; ++o) {
        const double v = patch->values[(cy * 4 + cx) * 8 + o];
        const bool hot = o == 0 && (cx == 1 || cx == 2);
        EXPECT_NEAR(v, hot ? 1.0 / std::sqrt(8.0) : 0.0, 1e-12);
      }
    }
  }
}

TEST(DenseDescriptorsTest, EdgeMassInHorizontalGradientBins) {
  // Bright-to-dark and dark-to-bright edges only excite orientations 0 and pi.
  for (bool flip : {false, true}) {
    GrayImage img = vertical_edge(48, 48, 21);
    if (flip) {
      std::vector<double> px = img.pixels();
      for (double& p : px) p = 1.0 - p;
      img = GrayImage(48, 48, px);
    }
    const DescriptorSet set = dense_descriptors(img);
    ASSERT_GT(set.nonzero_count(), 0u);
    for (const auto& d : set.descriptors) {
      double norm = 0.0;
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        norm += d.values[i] * d.values[i];
        if (i % 8 != 0 && i % 8 != 4) EXPECT_EQ(d.values[i], 0.0);
      }
      if (!d.is_zero()) EXPECT_NEAR(norm, 1.0, 1e-12);
    }
  }
}

TEST(DenseDescriptorsTest, NormalizedOrZeroOnNoise) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> px(40 * 40);
  for (double& p : px) p = u(rng);
  for (const auto& d : dense_descriptors(GrayImage(40, 40, px)).descriptors) {
    double norm = 0.0;
    for (double v : d.values) {
      EXPECT_GE(v, 0.0);
      norm += v * v;
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
  }
}

std::vector<double> point(double a, double b) {
  std::vector<double> v(kDescriptorDim, 0.0);
  v[0] = a;
  v[1] = b;
  return v;
}

TEST(VocabularyTest, SingleCenterIsMean) {
  DescriptorSet set;
  set.descriptors = {unit_descriptor(point(1, 0)), unit_descriptor(point(0, 1)),
                     unit_descriptor(point(2, 2)), unit_descriptor(point(0, 0))};
  const DescriptorSet sets[] = {set};
  const Vocabulary v = build_vocabulary(sets, 1, 7);
  ASSERT_EQ(v.k(), 1u);
  EXPECT_DOUBLE_EQ(v.centers[0][0], 1.0);
  EXPECT_DOUBLE_EQ(v.centers[0][1], 1.0);
}

TEST(VocabularyTest, RecoversTwoSeparatedClusters) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.01);
  DescriptorSet set;
  std::vector<double> mean_a(2, 0.0), mean_b(2, 0.0);
  for (int i = 0; i < 50; ++i) {
    const double ax = 1 + noise(rng), ay = 1 + noise(rng);
    const double bx = 5 + noise(rng), by = -3 + noise(rng);
    set.descriptors.push_back(unit_descriptor(point(ax, ay)));
    set.descriptors.push_back(unit_descriptor(point(bx, by)));
    mean_a[0] += ax / 50;
    mean_a[1] += ay / 50;
    mean_b[0] += bx / 50;
    mean_b[1] += by / 50;
  }
  const DescriptorSet sets[] = {set};
  const Vocabulary v = build_vocabulary(sets, 2, 5);
  const auto& c0 = v.centers[0][0] < 3 ? v.centers[0] : v.centers[1];
  const auto& c1 = v.centers[0][0] < 3 ? v.centers[1] : v.centers[0];
  EXPECT_NEAR(c0[0], mean_a[0], 1e-6);
  EXPECT_NEAR(c0[1], mean_a[1], 1e-6);
  EXPECT_NEAR(c1[0], mean_b[0], 1e-6);
  EXPECT_NEAR(c1[1], mean_b[1], 1e-6);
}

TEST(VocabularyTest, DeterministicAndSeeded) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DescriptorSet set;
  for (int i = 0; i < 200; ++i) set.descriptors.push_back(unit_descriptor(point(u(rng), u(rng))));
  const DescriptorSet sets[] = {set};
  const Vocabulary a = build_vocabulary(sets, 6, 42);
  const Vocabulary b = build_vocabulary(sets, 6, 42);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(a.training_seed, 42u);
}

TEST(VocabularyTest, Errors) {
  DescriptorSet set;
  set.descriptors = {unit_descriptor(point(1, 0)), unit_descriptor(point(0, 0))};
  const DescriptorSet sets[] = {set};
  EXPECT_THROW(build_vocabulary(sets, 2, 0), InsufficientDataError);
  EXPECT_THROW(build_vocabulary(sets, 0, 0), DomainError);
}

Vocabulary three_centers() {
  Vocabulary v;
  v.centers = {point(0, 0), point(10, 0), point(0, 10)};
  return v;
}

TEST(QuantizeTest, ConstructedCounts) {
  DescriptorSet set;
  set.descriptors = {unit_descriptor(point(1, 0)), unit_descriptor(point(0, 1)),
                     unit_descriptor(point(1, 1)), unit_descriptor(point(0, 9))};
  const BowHistogram h = quantize(set, three_centers());
  EXPECT_EQ(h.bins, (std::vector<double>{0.75, 0.0, 0.25}));
  EXPECT_EQ(h.descriptor_count, 4u);
}

TEST(QuantizeTest, EmptySetGivesZeroHistogram) {
  const BowHistogram h = quantize(DescriptorSet{}, three_centers());
  EXPECT_TRUE(h.all_zero());
  EXPECT_EQ(h.descriptor_count, 0u);
}

TEST(QuantizeTest, SingleWordVocabulary) {
  Vocabulary v;
  v.centers = {point(3, 3)};
  DescriptorSet set;
  set.descriptors = {unit_descriptor(point(1, 0)), unit_descriptor(point(7, 2))};
  EXPECT_EQ(quantize(set, v).bins, std::vector<double>{1.0});
}

TEST(QuantizeTest, TieGoesToLowestIndex) {
  Vocabulary v;
  v.centers = {point(1, 0), point(-1, 0)};
  EXPECT_EQ(nearest_center(point(0, 5), v), 0u);
}

TEST(QuantizeTest, DimensionMismatch) {
  DescriptorSet set;
  set.descriptors = {unit_descriptor({1.0, 2.0})};
  EXPECT_THROW(quantize(set, three_centers()), ShapeError);
}

TEST(QuantizeTest, MatchesExhaustiveSearchAndIgnoresOrder) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vocabulary v;
  for (int c = 0; c < 17; ++c) v.centers.push_back(point(u(rng) * 10, u(rng) * 10));
  DescriptorSet set;
  std::vector<double> expected(17, 0.0);
  for (int i = 0; i < 300; ++i) {
    const auto p = point(u(rng) * 10, u(rng) * 10);
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t c = 0; c < v.centers.size(); ++c) {
      const double d = std::hypot(p[0] - v.centers[c][0], p[1] - v.centers[c][1]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    expected[best] += 1.0 / 300;
    set.descriptors.push_back(unit_descriptor(p));
  }
  const BowHistogram h = quantize(set, v);
  double mass = 0.0;
  for (std::size_t c = 0; c < 17; ++c) {
    EXPECT_NEAR(h.bins[c], expected[c], 1e-12);
    mass += h.bins[c];
  }
  EXPECT_LT(std::abs(mass - 1.0), 1e-9);
  std::shuffle(set.descriptors.begin(), set.descriptors.end(), rng);
  EXPECT_EQ(quantize(set, v).bins, h.bins);
}

TEST(VocabularySourcesTest, PerClassCapAndDeterminism) {
  std::vector<DisplayType> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(kDisplayTypes[i % 3]);
  const auto a = select_vocabulary_sources(labels, 4, 1);
  EXPECT_EQ(a.size(), 12u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(a, select_vocabulary_sources(labels, 4, 1));
}

}  // namespace
}  // namespace pmfrank
