#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pmfrank/image.h"
#include "pmfrank/types.h"

namespace pmfrank {

// 4x4 spatial cells times 8 orientation bins.
inline constexpr int kSpatialCells = 4;
inline constexpr int kOrientationBins = 8;
inline constexpr std::size_t kDescriptorDim =
    kSpatialCells * kSpatialCells * kOrientationBins;

struct Descriptor {
  std::vector<double> values;
  // Patch center in pixel coordinates and the cell size it was computed at.
  double x = 0.0;
  double y = 0.0;
  int scale = 0;

  bool is_zero() const;
};

struct DescriptorSet {
  std::vector<Descriptor> descriptors;

  std::size_t size() const { return descriptors.size(); }
  std::size_t nonzero_count() const;
};

struct DenseDescriptorConfig {
  // Cell side length in pixels, one entry per scale.
  std::array<int, 3> bin_sizes = {4, 6, 8};
  // Grid spacing in pixels between neighbouring patch origins.
  int step = 4;
  // A patch whose total gradient magnitude is below this fraction of the
  // maximum attainable value yields the zero descriptor.
  double flat_threshold = 1e-4;
};

// Dense gradient-orientation descriptors on a regular grid at three scales.
// Each descriptor is L2-normalized or, for flat patches, the zero vector.
// Throws SizingError naming the first scale the image cannot hold.
DescriptorSet dense_descriptors(const GrayImage& image,
                                const DenseDescriptorConfig& config = {});

struct Vocabulary {
  std::vector<std::vector<double>> centers;
  std::uint64_t training_seed = 0;

  std::size_t k() const { return centers.size(); }
  std::size_t dimension() const {
    return centers.empty() ? 0 : centers.front().size();
  }
};

// k-means (k-means++ seeding, Lloyd updates) over every nonzero descriptor
// of every set, visited in set order then descriptor order. Deterministic in
// (sets, k, seed, max_iters). Stops after max_iters updates or once no
// assignment changes. An emptied cluster is re-seeded with the point
// farthest from its current center.
Vocabulary build_vocabulary(std::span<const DescriptorSet> sets, std::size_t k,
                            std::uint64_t seed, int max_iters = 100);

// Index of the nearest center by Euclidean distance; ties go to the lowest
// index.
std::size_t nearest_center(std::span<const double> point,
                           const Vocabulary& vocab);

// Bag-of-words histogram of the nonzero descriptors, L1-normalized.
BowHistogram quantize(const DescriptorSet& descriptors,
                      const Vocabulary& vocab);

// Picks up to per_class indices of each resolved type, uniformly under seed,
// as the image subset used for vocabulary building. Returned ascending.
std::vector<std::size_t> select_vocabulary_sources(
    std::span<const DisplayType> labels, std::size_t per_class,
    std::uint64_t seed);

}  // namespace pmfrank
