#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pmfrank/types.h"

namespace pmfrank {

// Homogeneous kernel map for the chi-square kernel (spectrum sech(pi*lambda)).
struct KernelMapConfig {
  // Number of frequency samples n; each input bin expands to 2n+1 values.
  int order = 3;
  // Sampling period L of the spectrum. Unset selects the order-dependent
  // period 2*pi / (5.86*sqrt(n) + 3.65).
  std::optional<double> period;
  // Homogeneity degree of the approximated kernel. Only gamma == 1 is the
  // chi-square kernel chi2_kernel computes.
  double gamma = 1.0;

  std::size_t block_size() const {
    return 2 * static_cast<std::size_t>(order) + 1;
  }
  double resolved_period() const;
};

double default_kernel_period(int order);

// Spectral signature of the chi-square kernel, sech(pi * lambda).
double chi2_spectrum(double lambda);

// K(x, y) = sum_i 2 x_i y_i / (x_i + y_i) with 0/0 terms read as 0.
double chi2_kernel(std::span<const double> x, std::span<const double> y);
double chi2_kernel(const BowHistogram& x, const BowHistogram& y);

struct MappedFeature {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
};

// Finite-dimensional feature map whose dot products approximate chi2_kernel.
// A zero bin maps to a zero block. Throws DomainError on negative bins or an
// invalid config.
MappedFeature approx_map(std::span<const double> x, const KernelMapConfig& cfg);
MappedFeature approx_map(const BowHistogram& x, const KernelMapConfig& cfg);

double dot(const MappedFeature& a, const MappedFeature& b);

struct MapErrorSummary {
  double mean_relative_error = 0.0;
  double max_relative_error = 0.0;
  std::size_t pairs = 0;
};

// Compares exact chi-square kernel values with mapped dot products. For a
// pair whose exact kernel is 0 the absolute error is reported in place of
// the relative one. Throws DomainError on an empty sample list.
MapErrorSummary map_error_report(
    std::span<const std::pair<BowHistogram, BowHistogram>> samples,
    const KernelMapConfig& cfg);

}  // namespace pmfrank
