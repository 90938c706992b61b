#include "pmfrank/kernel.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pmfrank/errors.h"

namespace pmfrank {

double default_kernel_period(int order) {
  return 2.0 * std::numbers::pi / (5.86 * std::sqrt(static_cast<double>(order)) + 3.65);
}

double KernelMapConfig::resolved_period() const {
  return period ? *period : default_kernel_period(order);
}

double chi2_spectrum(double lambda) {
  return 1.0 / std::cosh(std::numbers::pi * lambda);
}

double chi2_kernel(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("chi2_kernel: dimensions " + std::to_string(x.size()) +
                     " and " + std::to_string(y.size()) + " differ");
  }
  double k = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = x[i] + y[i];
    if (s > 0.0) k += 2.0 * x[i] * y[i] / s;
  }
  return k;
}

double chi2_kernel(const BowHistogram& x, const BowHistogram& y) {
  return chi2_kernel(x.bins, y.bins);
}

MappedFeature approx_map(std::span<const double> x,
                         const KernelMapConfig& cfg) {
  if (cfg.order < 0) throw DomainError("kernel map order must be nonnegative");
  const double period = cfg.resolved_period();
  if (!(period > 0.0)) throw DomainError("kernel map period must be positive");
  if (!(cfg.gamma > 0.0)) throw DomainError("kernel map gamma must be positive");

  const std::size_t block = cfg.block_size();
  // Per-frequency amplitudes sqrt(L*kappa(0)) and sqrt(2*L*kappa(j*L)).
  std::vector<double> amplitude(static_cast<std::size_t>(cfg.order) + 1);
  amplitude[0] = std::sqrt(period * chi2_spectrum(0.0));
  for (int j = 1; j <= cfg.order; ++j) {
    amplitude[j] = std::sqrt(2.0 * period * chi2_spectrum(j * period));
  }

  MappedFeature out;
  out.values.assign(x.size() * block, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    if (v < 0.0 || !std::isfinite(v)) {
      throw DomainError("approx_map: bin " + std::to_string(i) +
                        " is negative or non-finite");
    }
    if (v == 0.0) continue;
    const double scale = std::pow(v, 0.5 * cfg.gamma);
    const double log_v = std::log(v);
    double* dst = out.values.data() + i * block;
    dst[0] = scale * amplitude[0];
    for (int j = 1; j <= cfg.order; ++j) {
      const double phase = j * period * log_v;
      dst[2 * j - 1] = scale * amplitude[j] * std::cos(phase);
      dst[2 * j] = scale * amplitude[j] * std::sin(phase);
    }
  }
  return out;
}

MappedFeature approx_map(const BowHistogram& x, const KernelMapConfig& cfg) {
  return approx_map(x.bins, cfg);
}

double dot(const MappedFeature& a, const MappedFeature& b) {
  if (a.values.size() != b.values.size()) {
    throw ShapeError("dot: mapped dimensions differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    s += a.values[i] * b.values[i];
  }
  return s;
}

MapErrorSummary map_error_report(
    std::span<const std::pair<BowHistogram, BowHistogram>> samples,
    const KernelMapConfig& cfg) {
  if (samples.empty()) throw DomainError("map_error_report: no samples");
  MapErrorSummary summary;
  double total = 0.0;
  for (const auto& [x, y] : samples) {
    const double exact = chi2_kernel(x, y);
    const double approx = dot(approx_map(x, cfg), approx_map(y, cfg));
    const double abs_err = std::abs(approx - exact);
    const double err = exact > 0.0 ? abs_err / exact : abs_err;
    total += err;
    summary.max_relative_error = std::max(summary.max_relative_error, err);
  }
  summary.pairs = samples.size();
  summary.mean_relative_error = total / static_cast<double>(samples.size());
  return summary;
}

}  // namespace pmfrank
