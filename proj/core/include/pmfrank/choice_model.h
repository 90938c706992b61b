#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pmfrank/rng.h"

namespace pmfrank {

// Multivariate Fisher noncentral hypergeometric model of which kinds of
// item a user takes from a displayed set.
//
// gamma[i] items of kind i are displayed and n_hat of the n = sum(gamma)
// are taken; items are taken independently with kind-specific odds omega[i],
// conditioned on the total. The pmf of the taken counts eta is
//
//   P(eta) = prod_i C(gamma_i, eta_i) omega_i^eta_i / sum_{t in domain} (same)
//
// over the domain { eta : sum eta_i = n_hat, 0 <= eta_i <= gamma_i }.

struct UrnConfig {
  std::vector<int> gamma;
  int n_hat = 0;

  std::size_t kinds() const { return gamma.size(); }
  int total() const;
};

// Throws DomainError unless c >= 1, gamma_i >= 0 and 0 <= n_hat <= n.
void check_urn(const UrnConfig& cfg);

// Odds per kind. Only ratios matter; the canonical form has omega[0] == 1,
// kind 0 being Person.
struct WeightVector {
  std::vector<double> omega;

  bool is_canonical(double tolerance = 1e-12) const;
  WeightVector canonical() const;
};

struct Observation {
  UrnConfig urn;
  std::vector<int> eta;
};

using ObservationSet = std::vector<Observation>;

// Product of (gamma_i + 1) above which exact enumeration is refused.
inline constexpr double kDefaultEnumerationGuard = 1e7;

// Upper bound on the domain size, prod (gamma_i + 1).
double domain_size_bound(const UrnConfig& cfg);

// Every eta in the domain, in lexicographic order. Throws
// DomainTooLargeError when domain_size_bound exceeds guard.
std::vector<std::vector<int>> enumerate_domain(
    const UrnConfig& cfg, double guard = kDefaultEnumerationGuard);

bool in_domain(std::span<const int> eta, const UrnConfig& cfg);

// log of the normalizing constant, by polynomial convolution in log space.
// Exact for any config size.
double log_normalizer(const UrnConfig& cfg, const WeightVector& omega);

// log P(eta); -infinity outside the domain.
double log_pmf(std::span<const int> eta, const UrnConfig& cfg,
               const WeightVector& omega);

// P(eta); exactly 0 outside the domain. Throws DomainError for an invalid
// config or non-positive weights.
double pmf(std::span<const int> eta, const UrnConfig& cfg,
           const WeightVector& omega);

// Exact sampler. Within the guard it inverts the CDF over the enumerated
// domain; beyond it, it draws eta_1 from its exact marginal and recurses on
// the remaining kinds.
class UrnSampler {
 public:
  UrnSampler(UrnConfig cfg, WeightVector omega,
             double guard = kDefaultEnumerationGuard);

  std::vector<int> operator()(Rng& rng) const;
  bool uses_enumeration() const { return !domain_.empty(); }

 private:
  std::vector<int> sample_sequential(Rng& rng) const;

  UrnConfig cfg_;
  WeightVector omega_;
  std::vector<std::vector<int>> domain_;
  std::vector<double> cdf_;
  // suffix_[i][k]: log coefficient of z^k in prod_{j >= i} of kind j's
  // generating polynomial.
  std::vector<std::vector<double>> suffix_;
};

std::vector<int> sample(const UrnConfig& cfg, const WeightVector& omega,
                        std::uint64_t seed,
                        double guard = kDefaultEnumerationGuard);

// Exact mean by pmf-weighted enumeration; throws DomainTooLargeError past
// the guard.
std::vector<double> mean_exact(const UrnConfig& cfg, const WeightVector& omega,
                               double guard = kDefaultEnumerationGuard);

// Mean approximation mu_i = gamma_i w_i t / (1 + w_i t) with t > 0 solving
// sum_i mu_i = n_hat, found by bisection on log t.
std::vector<double> mean_approx(const UrnConfig& cfg, const WeightVector& omega);

// Exact within the guard, approximate beyond it. n_hat == 0 gives zeros.
std::vector<double> mean(const UrnConfig& cfg, const WeightVector& omega,
                         double guard = kDefaultEnumerationGuard);

struct UrnMoments {
  std::vector<double> mean;
  std::vector<std::vector<double>> covariance;
};

// Exact first and second moments via leave-one-out and leave-two-out
// generating polynomials. Used by the likelihood solver.
UrnMoments moments(const UrnConfig& cfg, const WeightVector& omega);

enum class EstimationMethod { kExactMle, kMoment };

struct EstimationOptions {
  // Convergence threshold on the Euclidean norm of the per-observation
  // averaged gradient (ExactMLE) or moment residual (Moment).
  double tolerance = 1e-8;
  int max_iterations = 200;
  double guard = kDefaultEnumerationGuard;
};

struct EstimationResult {
  WeightVector weights;  // canonical
  int iterations = 0;
  double residual_norm = 0.0;
  double log_likelihood = 0.0;
};

// Sum over observations of log P(eta; gamma, n_hat, omega).
double log_likelihood(const ObservationSet& obs, const WeightVector& omega);

// Estimates canonical odds from observations. Throws DomainError for a
// malformed observation and EstimationError, naming the kind, when some
// kind is never taken or always fully taken in aggregate.
EstimationResult estimate_weights(const ObservationSet& obs,
                                  EstimationMethod method,
                                  const EstimationOptions& options = {});

}  // namespace pmfrank
