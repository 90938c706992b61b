#include "pmfrank/features.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pmfrank/errors.h"
#include "pmfrank/rng.h"

namespace pmfrank {

bool Descriptor::is_zero() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return v == 0.0; });
}

std::size_t DescriptorSet::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(descriptors.begin(), descriptors.end(),
                    [](const Descriptor& d) { return !d.is_zero(); }));
}

namespace {

struct GradientField {
  std::vector<double> magnitude;
  std::vector<double> orientation;  // radians in [0, 2*pi)
};

GradientField compute_gradients(const GrayImage& image) {
  const int w = image.width();
  const int h = image.height();
  GradientField field;
  field.magnitude.resize(static_cast<std::size_t>(w) * h);
  field.orientation.resize(field.magnitude.size());
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, w - 1);
      const double gx = 0.5 * (image.at(xp, y) - image.at(xm, y));
      const double gy = 0.5 * (image.at(x, yp) - image.at(x, ym));
      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      field.magnitude[i] = std::hypot(gx, gy);
      field.orientation[i] = theta;
    }
  }
  return field;
}

Descriptor describe_patch(const GradientField& field, int image_width,
                          int x0, int y0, int cell, double flat_threshold) {
  Descriptor d;
  d.values.assign(kDescriptorDim, 0.0);
  d.scale = cell;
  d.x = x0 + 0.5 * kSpatialCells * cell;
  d.y = y0 + 0.5 * kSpatialCells * cell;

  const double bin_width = 2.0 * std::numbers::pi / kOrientationBins;
  const int side = kSpatialCells * cell;
  double energy = 0.0;
  for (int dy = 0; dy < side; ++dy) {
    const int cy = dy / cell;
    for (int dx = 0; dx < side; ++dx) {
      const int cx = dx / cell;
      const std::size_t i =
          static_cast<std::size_t>(y0 + dy) * image_width + (x0 + dx);
      const double m = field.magnitude[i];
      if (m == 0.0) continue;
      energy += m;
      // Linear interpolation between the two nearest orientation centers.
      const double t = field.orientation[i] / bin_width;
      const double lower = std::floor(t);
      const double frac = t - lower;
      const int o0 = static_cast<int>(lower) % kOrientationBins;
      const int o1 = (o0 + 1) % kOrientationBins;
      const std::size_t base =
          static_cast<std::size_t>(cy * kSpatialCells + cx) * kOrientationBins;
      d.values[base + o0] += m * (1.0 - frac);
      if (frac > 0.0) d.values[base + o1] += m * frac;
    }
  }

  // Central differences on [0,1] intensities bound each magnitude by
  // sqrt(0.5).
  const double max_energy = static_cast<double>(side) * side * std::sqrt(0.5);
  if (energy < flat_threshold * max_energy) {
    std::fill(d.values.begin(), d.values.end(), 0.0);
    return d;
  }
  double norm = 0.0;
  for (double v : d.values) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : d.values) v /= norm;
  return d;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace

DescriptorSet dense_descriptors(const GrayImage& image,
                                const DenseDescriptorConfig& config) {
  if (config.step <= 0) throw DomainError("descriptor grid step must be positive");
  for (int cell : config.bin_sizes) {
    if (cell <= 0) throw DomainError("descriptor bin size must be positive");
    const int side = kSpatialCells * cell;
    if (image.width() < side || image.height() < side) {
      throw SizingError("image " + std::to_string(image.width()) + "x" +
                        std::to_string(image.height()) +
                        " too small for bin size " + std::to_string(cell) +
                        " (needs at least " + std::to_string(side) + "x" +
                        std::to_string(side) + ")");
    }
  }

  const GradientField field = compute_gradients(image);
  DescriptorSet set;
  for (int cell : config.bin_sizes) {
    const int side = kSpatialCells * cell;
    for (int y0 = 0; y0 + side <= image.height(); y0 += config.step) {
      for (int x0 = 0; x0 + side <= image.width(); x0 += config.step) {
        set.descriptors.push_back(describe_patch(field, image.width(), x0, y0,
                                                 cell, config.flat_threshold));
      }
    }
  }
  return set;
}

std::size_t nearest_center(std::span<const double> point,
                           const Vocabulary& vocab) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < vocab.centers.size(); ++c) {
    const double d = squared_distance(point, vocab.centers[c]);
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

Vocabulary build_vocabulary(std::span<const DescriptorSet> sets, std::size_t k,
                            std::uint64_t seed, int max_iters) {
  if (k == 0) throw DomainError("vocabulary size k must be positive");
  if (max_iters <= 0) throw DomainError("max_iters must be positive");

  std::vector<const std::vector<double>*> points;
  std::size_t dim = 0;
  for (const DescriptorSet& set : sets) {
    for (const Descriptor& d : set.descriptors) {
      if (d.is_zero()) continue;
      if (points.empty()) {
        dim = d.values.size();
      } else if (d.values.size() != dim) {
        throw ShapeError("descriptor dimension " +
                         std::to_string(d.values.size()) + " differs from " +
                         std::to_string(dim));
      }
      points.push_back(&d.values);
    }
  }
  const std::size_t n = points.size();
  if (n < k) {
    throw InsufficientDataError("need at least " + std::to_string(k) +
                                " nonzero descriptors, got " +
                                std::to_string(n));
  }

  Rng rng(seed);
  Vocabulary vocab;
  vocab.training_seed = seed;
  vocab.centers.reserve(k);

  // k-means++ seeding.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = uniform_below(rng, n);
  for (std::size_t c = 0; c < k; ++c) {
    vocab.centers.push_back(*points[pick]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] =
          std::min(nearest[i], squared_distance(*points[i], vocab.centers[c]));
      total += nearest[i];
    }
    if (c + 1 == k) break;
    if (total > 0.0) {
      const double r = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (acc > r && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_below(rng, n);
    }
  }

  std::vector<std::size_t> assignment(n);
  std::vector<double> dist(n);
  auto assign = [&]() {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest_center(*points[i], vocab);
      if (c != assignment[i]) changed = true;
      assignment[i] = c;
      dist[i] = squared_distance(*points[i], vocab.centers[c]);
    }
    return changed;
  };
  assign();

  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = assignment[i];
      ++counts[c];
      const std::vector<double>& p = *points[i];
      for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += p[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        const auto far = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        vocab.centers[c] = *points[far];
        dist[far] = 0.0;
        continue;
      }
      for (std::size_t j = 0; j < dim; ++j) {
        vocab.centers[c][j] =
            sums[c * dim + j] / static_cast<double>(counts[c]);
      }
    }
    if (!assign()) break;
  }
  return vocab;
}

BowHistogram quantize(const DescriptorSet& descriptors,
                      const Vocabulary& vocab) {
  if (vocab.k() == 0) throw DomainError("empty vocabulary");
  BowHistogram hist;
  hist.bins.assign(vocab.k(), 0.0);
  std::size_t count = 0;
  for (const Descriptor& d : descriptors.descriptors) {
    if (d.values.size() != vocab.dimension()) {
      throw ShapeError("descriptor dimension " +
                       std::to_string(d.values.size()) +
                       " does not match vocabulary dimension " +
                       std::to_string(vocab.dimension()));
    }
    if (d.is_zero()) continue;
    hist.bins[nearest_center(d.values, vocab)] += 1.0;
    ++count;
  }
  if (count > 0) {
    for (double& b : hist.bins) b /= static_cast<double>(count);
  }
  hist.descriptor_count = count;
  return hist;
}

std::vector<std::size_t> select_vocabulary_sources(
    std::span<const DisplayType> labels, std::size_t per_class,
    std::uint64_t seed) {
  std::vector<std::size_t> selected;
  for (std::size_t t = 0; t < kNumDisplayTypes; ++t) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == kDisplayTypes[t]) pool.push_back(i);
    }
    Rng rng(derive_seed(seed, t));
    shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(pool.size(), per_class));
    selected.insert(selected.end(), pool.begin(), pool.end());
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

}  // namespace pmfrank
