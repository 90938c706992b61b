#include "pmfrank/choice_model.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "pmfrank/errors.h"
#include "pmfrank/types.h"

namespace pmfrank {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_weights(const UrnConfig& cfg, const WeightVector& omega) {
  if (omega.omega.size() != cfg.kinds()) {
    throw DomainError("weight vector has " + std::to_string(omega.omega.size()) +
                      " entries for " + std::to_string(cfg.kinds()) + " kinds");
  }
  for (double w : omega.omega) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("weights must be positive and finite");
    }
  }
}

std::string kind_name(std::size_t kinds, std::size_t i) {
  if (kinds == kNumDisplayTypes) {
    return std::string(display_type_name(kDisplayTypes[i]));
  }
  return "kind " + std::to_string(i);
}

// log of C(gamma_i, t) * omega_i^t for t = 0..gamma_i.
std::vector<double> log_terms(int gamma, double omega) {
  std::vector<double> terms(static_cast<std::size_t>(gamma) + 1);
  const double lw = std::log(omega);
  for (int t = 0; t <= gamma; ++t) terms[t] = log_binomial(gamma, t) + t * lw;
  return terms;
}

// log coefficients of z^0..z^max_total of prod over `kinds` of
// sum_t C(gamma_i, t) omega_i^t z^t.
std::vector<double> log_poly(const UrnConfig& cfg, const WeightVector& omega,
                             std::span<const std::size_t> kinds, int max_total) {
  std::vector<double> cur(static_cast<std::size_t>(max_total) + 1, kNegInf);
  cur[0] = 0.0;
  std::vector<double> next(cur.size());
  for (std::size_t i : kinds) {
    const std::vector<double> terms = log_terms(cfg.gamma[i], omega.omega[i]);
    for (int k = 0; k <= max_total; ++k) {
      double acc = kNegInf;
      for (int t = 0; t <= std::min(cfg.gamma[i], k); ++t) {
        if (cur[k - t] == kNegInf) continue;
        acc = log_add(acc, cur[k - t] + terms[t]);
      }
      next[k] = acc;
    }
    std::swap(cur, next);
  }
  return cur;
}

std::vector<std::size_t> all_kinds_except(std::size_t c, std::size_t skip_a,
                                          std::size_t skip_b) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c; ++i) {
    if (i != skip_a && i != skip_b) out.push_back(i);
  }
  return out;
}

void enumerate_into(const UrnConfig& cfg, std::size_t kind, int remaining,
                    const std::vector<int>& capacity_after,
                    std::vector<int>& current,
                    std::vector<std::vector<int>>& out) {
  if (kind + 1 == cfg.kinds()) {
    if (remaining <= cfg.gamma[kind]) {
      current[kind] = remaining;
      out.push_back(current);
    }
    return;
  }
  const int lo = std::max(0, remaining - capacity_after[kind]);
  const int hi = std::min(cfg.gamma[kind], remaining);
  for (int t = lo; t <= hi; ++t) {
    current[kind] = t;
    enumerate_into(cfg, kind + 1, remaining - t, capacity_after, current, out);
  }
}

}  // namespace

int UrnConfig::total() const {
  return std::accumulate(gamma.begin(), gamma.end(), 0);
}

void check_urn(const UrnConfig& cfg) {
  if (cfg.gamma.empty()) throw DomainError("urn needs at least one kind");
  for (int g : cfg.gamma) {
    if (g < 0) throw DomainError("urn gamma entries must be nonnegative");
  }
  if (cfg.n_hat < 0 || cfg.n_hat > cfg.total()) {
    throw DomainError("urn n_hat " + std::to_string(cfg.n_hat) +
                      " outside [0, " + std::to_string(cfg.total()) + "]");
  }
}

bool WeightVector::is_canonical(double tolerance) const {
  if (omega.empty() || std::abs(omega[0] - 1.0) > tolerance) return false;
  return std::all_of(omega.begin(), omega.end(),
                     [](double w) { return w > 0.0 && std::isfinite(w); });
}

WeightVector WeightVector::canonical() const {
  if (omega.empty() || !(omega[0] > 0.0)) {
    throw NormalizationError("cannot normalize: reference weight not positive");
  }
  WeightVector out = *this;
  for (double& w : out.omega) w /= omega[0];
  out.omega[0] = 1.0;
  return out;
}

double domain_size_bound(const UrnConfig& cfg) {
  double product = 1.0;
  for (int g : cfg.gamma) product *= static_cast<double>(g) + 1.0;
  return product;
}

std::vector<std::vector<int>> enumerate_domain(const UrnConfig& cfg,
                                               double guard) {
  check_urn(cfg);
  if (domain_size_bound(cfg) > guard) {
    throw DomainTooLargeError(
        "urn domain bound " + std::to_string(domain_size_bound(cfg)) +
        " exceeds enumeration guard; use the approximate mean or the "
        "sequential sampler");
  }
  std::vector<int> capacity_after(cfg.kinds(), 0);
  for (std::size_t i = cfg.kinds() - 1; i-- > 0;) {
    capacity_after[i] = capacity_after[i + 1] + cfg.gamma[i + 1];
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current(cfg.kinds(), 0);
  enumerate_into(cfg, 0, cfg.n_hat, capacity_after, current, out);
  return out;
}

bool in_domain(std::span<const int> eta, const UrnConfig& cfg) {
  if (eta.size() != cfg.kinds()) return false;
  int sum = 0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] < 0 || eta[i] > cfg.gamma[i]) return false;
    sum += eta[i];
  }
  return sum == cfg.n_hat;
}

double log_normalizer(const UrnConfig& cfg, const WeightVector& omega) {
  check_urn(cfg);
  check_weights(cfg, omega);
  const auto kinds = all_kinds_except(cfg.kinds(), cfg.kinds(), cfg.kinds());
  return log_poly(cfg, omega, kinds, cfg.n_hat)[cfg.n_hat];
}

double log_pmf(std::span<const int> eta, const UrnConfig& cfg,
               const WeightVector& omega) {
  const double log_z = log_normalizer(cfg, omega);
  if (!in_domain(eta, cfg)) return kNegInf;
  double log_g = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    log_g += log_binomial(cfg.gamma[i], eta[i]) + eta[i] * std::log(omega.omega[i]);
  }
  return log_g - log_z;
}

double pmf(std::span<const int> eta, const UrnConfig& cfg,
           const WeightVector& omega) {
  const double lp = log_pmf(eta, cfg, omega);
  return lp == kNegInf ? 0.0 : std::exp(lp);
}

UrnSampler::UrnSampler(UrnConfig cfg, WeightVector omega, double guard)
    : cfg_(std::move(cfg)), omega_(std::move(omega)) {
  check_urn(cfg_);
  check_weights(cfg_, omega_);
  if (domain_size_bound(cfg_) <= guard) {
    domain_ = enumerate_domain(cfg_, guard);
    const double log_z = log_normalizer(cfg_, omega_);
    cdf_.reserve(domain_.size());
    double acc = 0.0;
    for (const auto& eta : domain_) {
      double log_g = 0.0;
      for (std::size_t i = 0; i < eta.size(); ++i) {
        log_g += log_binomial(cfg_.gamma[i], eta[i]) +
                 eta[i] * std::log(omega_.omega[i]);
      }
      acc += std::exp(log_g - log_z);
      cdf_.push_back(acc);
    }
    return;
  }
  const std::size_t c = cfg_.kinds();
  suffix_.resize(c + 1);
  suffix_[c].assign(static_cast<std::size_t>(cfg_.n_hat) + 1, kNegInf);
  suffix_[c][0] = 0.0;
  for (std::size_t i = c; i-- > 0;) {
    std::vector<std::size_t> kinds;
    for (std::size_t j = i; j < c; ++j) kinds.push_back(j);
    suffix_[i] = log_poly(cfg_, omega_, kinds, cfg_.n_hat);
  }
}

std::vector<int> UrnSampler::operator()(Rng& rng) const {
  if (domain_.empty()) return sample_sequential(rng);
  // Scale by the final cumulative value so rounding never leaves a gap.
  const double u = uniform01(rng) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(
      static_cast<std::size_t>(it - cdf_.begin()), domain_.size() - 1);
  return domain_[idx];
}

std::vector<int> UrnSampler::sample_sequential(Rng& rng) const {
  const std::size_t c = cfg_.kinds();
  std::vector<int> eta(c, 0);
  int remaining = cfg_.n_hat;
  for (std::size_t i = 0; i + 1 < c; ++i) {
    const std::vector<double> terms = log_terms(cfg_.gamma[i], omega_.omega[i]);
    const int hi = std::min(cfg_.gamma[i], remaining);
    std::vector<double> logw(static_cast<std::size_t>(hi) + 1, kNegInf);
    double log_total = kNegInf;
    for (int t = 0; t <= hi; ++t) {
      const double rest = suffix_[i + 1][remaining - t];
      if (rest == kNegInf) continue;
      logw[t] = terms[t] + rest;
      log_total = log_add(log_total, logw[t]);
    }
    const double u = uniform01(rng);
    double acc = 0.0;
    int pick = -1;
    for (int t = 0; t <= hi; ++t) {
      if (logw[t] == kNegInf) continue;
      pick = t;
      acc += std::exp(logw[t] - log_total);
      if (u < acc) break;
    }
    eta[i] = pick;
    remaining -= pick;
  }
  eta[c - 1] = remaining;
  return eta;
}

std::vector<int> sample(const UrnConfig& cfg, const WeightVector& omega,
                        std::uint64_t seed, double guard) {
  Rng rng(seed);
  return UrnSampler(cfg, omega, guard)(rng);
}

std::vector<double> mean_exact(const UrnConfig& cfg, const WeightVector& omega,
                               double guard) {
  check_weights(cfg, omega);
  const auto domain = enumerate_domain(cfg, guard);
  std::vector<double> mu(cfg.kinds(), 0.0);
  for (const auto& eta : domain) {
    const double p = pmf(eta, cfg, omega);
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += p * eta[i];
  }
  return mu;
}

std::vector<double> mean_approx(const UrnConfig& cfg, const WeightVector& omega) {
  check_urn(cfg);
  check_weights(cfg, omega);
  const std::size_t c = cfg.kinds();
  std::vector<double> mu(c, 0.0);
  if (cfg.n_hat == 0) return mu;
  if (cfg.n_hat == cfg.total()) {
    for (std::size_t i = 0; i < c; ++i) mu[i] = cfg.gamma[i];
    return mu;
  }
  std::vector<double> log_w(c);
  for (std::size_t i = 0; i < c; ++i) log_w[i] = std::log(omega.omega[i]);
  // Total taken as a function of u = log(theta); strictly increasing.
  auto taken = [&](double u) {
    double s = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      s += cfg.gamma[i] / (1.0 + std::exp(-(log_w[i] + u)));
    }
    return s;
  };
  double lo = -1.0;
  double hi = 1.0;
  while (taken(lo) > cfg.n_hat) lo *= 2.0;
  while (taken(hi) < cfg.n_hat) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (taken(mid) < cfg.n_hat ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < c; ++i) {
    mu[i] = cfg.gamma[i] / (1.0 + std::exp(-(log_w[i] + u)));
  }
  return mu;
}

std::vector<double> mean(const UrnConfig& cfg, const WeightVector& omega,
                         double guard) {
  check_urn(cfg);
  check_weights(cfg, omega);
  if (cfg.n_hat == 0) return std::vector<double>(cfg.kinds(), 0.0);
  if (domain_size_bound(cfg) <= guard) return mean_exact(cfg, omega, guard);
  return mean_approx(cfg, omega);
}

UrnMoments moments(const UrnConfig& cfg, const WeightVector& omega) {
  check_urn(cfg);
  check_weights(cfg, omega);
  const std::size_t c = cfg.kinds();
  const int n_hat = cfg.n_hat;
  const double log_z = log_normalizer(cfg, omega);

  std::vector<std::vector<double>> terms(c);
  for (std::size_t i = 0; i < c; ++i) terms[i] = log_terms(cfg.gamma[i], omega.omega[i]);

  UrnMoments m;
  m.mean.assign(c, 0.0);
  m.covariance.assign(c, std::vector<double>(c, 0.0));
  std::vector<double> second(c, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    const auto rest = log_poly(cfg, omega, all_kinds_except(c, i, c), n_hat);
    for (int t = 1; t <= std::min(cfg.gamma[i], n_hat); ++t) {
      if (rest[n_hat - t] == kNegInf) continue;
      const double p = std::exp(terms[i][t] + rest[n_hat - t] - log_z);
      m.mean[i] += t * p;
      second[i] += static_cast<double>(t) * t * p;
    }
  }
  for (std::size_t i = 0; i < c; ++i) {
    m.covariance[i][i] = second[i] - m.mean[i] * m.mean[i];
    for (std::size_t j = i + 1; j < c; ++j) {
      const auto rest = log_poly(cfg, omega, all_kinds_except(c, i, j), n_hat);
      double cross = 0.0;
      for (int t = 1; t <= std::min(cfg.gamma[i], n_hat); ++t) {
        for (int s = 1; s <= std::min(cfg.gamma[j], n_hat - t); ++s) {
          if (rest[n_hat - t - s] == kNegInf) continue;
          cross += static_cast<double>(t) * s *
                   std::exp(terms[i][t] + terms[j][s] + rest[n_hat - t - s] - log_z);
        }
      }
      m.covariance[i][j] = m.covariance[j][i] = cross - m.mean[i] * m.mean[j];
    }
  }
  return m;
}

double log_likelihood(const ObservationSet& obs, const WeightVector& omega) {
  double ll = 0.0;
  for (const Observation& o : obs) ll += log_pmf(o.eta, o.urn, omega);
  return ll;
}

namespace {

// Observations sharing (gamma, n_hat) are sufficient-statistic equivalent:
// only their count and summed eta matter.
struct ObservationGroup {
  UrnConfig urn;
  double count = 0.0;
  std::vector<double> eta_sum;
};

std::vector<ObservationGroup> group_observations(const ObservationSet& obs) {
  if (obs.empty()) throw EstimationError("no observations");
  const std::size_t c = obs.front().urn.kinds();
  std::map<std::pair<std::vector<int>, int>, ObservationGroup> groups;
  for (const Observation& o : obs) {
    check_urn(o.urn);
    if (o.urn.kinds() != c) throw DomainError("observations disagree on the number of kinds");
    if (!in_domain(o.eta, o.urn)) {
      throw DomainError("observation eta outside its urn domain");
    }
    auto [it, inserted] =
        groups.try_emplace({o.urn.gamma, o.urn.n_hat}, ObservationGroup{});
    ObservationGroup& g = it->second;
    if (inserted) {
      g.urn = o.urn;
      g.eta_sum.assign(c, 0.0);
    }
    g.count += 1.0;
    for (std::size_t i = 0; i < c; ++i) g.eta_sum[i] += o.eta[i];
  }
  std::vector<ObservationGroup> out;
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

void check_identifiable(const ObservationSet& obs) {
  const std::size_t c = obs.front().urn.kinds();
  std::vector<long long> taken(c, 0);
  std::vector<long long> shown(c, 0);
  for (const Observation& o : obs) {
    for (std::size_t i = 0; i < c; ++i) {
      taken[i] += o.eta[i];
      shown[i] += o.urn.gamma[i];
    }
  }
  for (std::size_t i = 0; i < c; ++i) {
    if (taken[i] == 0) {
      throw EstimationError(kind_name(c, i) +
                            " is never taken; its weight is unidentifiable (0)");
    }
    if (taken[i] == shown[i]) {
      throw EstimationError(kind_name(c, i) +
                            " is always fully taken; its weight is "
                            "unidentifiable (infinite)");
    }
  }
}

WeightVector weights_from_log(const Eigen::VectorXd& beta) {
  WeightVector w;
  w.omega.assign(static_cast<std::size_t>(beta.size()) + 1, 1.0);
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    w.omega[static_cast<std::size_t>(i) + 1] = std::exp(beta[i]);
  }
  return w;
}

// Gradient (per observation) and negated Hessian of the log-likelihood with
// respect to the free log-odds beta_1..beta_{c-1}.
struct LikelihoodState {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd information;
};

LikelihoodState likelihood_state(const std::vector<ObservationGroup>& groups,
                                 const Eigen::VectorXd& beta, double n_obs) {
  const auto free = beta.size();
  const WeightVector w = weights_from_log(beta);
  LikelihoodState s;
  s.gradient = Eigen::VectorXd::Zero(free);
  s.information = Eigen::MatrixXd::Zero(free, free);
  for (const ObservationGroup& g : groups) {
    const UrnMoments m = moments(g.urn, w);
    s.value -= g.count * log_normalizer(g.urn, w);
    for (Eigen::Index a = 0; a < free; ++a) {
      const auto i = static_cast<std::size_t>(a) + 1;
      s.value += g.eta_sum[i] * beta[a];
      s.gradient[a] += g.eta_sum[i] - g.count * m.mean[i];
      for (Eigen::Index b = 0; b < free; ++b) {
        s.information(a, b) += g.count * m.covariance[i][static_cast<std::size_t>(b) + 1];
      }
    }
  }
  s.value /= n_obs;
  s.gradient /= n_obs;
  s.information /= n_obs;
  return s;
}

EstimationResult estimate_mle(const std::vector<ObservationGroup>& groups,
                              double n_obs, const EstimationOptions& options) {
  const std::size_t c = groups.front().urn.kinds();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c) - 1);
  EstimationResult result;
  LikelihoodState state = likelihood_state(groups, beta, n_obs);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (state.gradient.norm() < options.tolerance) break;
    const Eigen::VectorXd step = state.information.ldlt().solve(state.gradient);
    double t = 1.0;
    LikelihoodState trial;
    Eigen::VectorXd candidate;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      candidate = beta + t * step;
      trial = likelihood_state(groups, candidate, n_obs);
      if (trial.value >= state.value - 1e-15 * std::abs(state.value)) break;
    }
    result.iterations = iter + 1;
    if ((candidate - beta).norm() == 0.0) break;
    beta = candidate;
    state = std::move(trial);
  }
  result.residual_norm = state.gradient.norm();
  if (!(result.residual_norm < options.tolerance)) {
    throw EstimationError("ExactMLE did not reach gradient norm " +
                          std::to_string(options.tolerance) + " (got " +
                          std::to_string(result.residual_norm) + ")");
  }
  result.weights = weights_from_log(beta);
  return result;
}

// Moment residual sum_g (count * mu_i(omega) - eta_sum_i) / n_obs and its
// Jacobian in beta. The Jacobian is the exact covariance when the mean is
// exact, or the derivative of the fixed-point approximation otherwise.
void moment_system(const std::vector<ObservationGroup>& groups,
                   const Eigen::VectorXd& beta, double n_obs, double guard,
                   Eigen::VectorXd& residual, Eigen::MatrixXd& jacobian) {
  const auto free = beta.size();
  const WeightVector w = weights_from_log(beta);
  residual = Eigen::VectorXd::Zero(free);
  jacobian = Eigen::MatrixXd::Zero(free, free);
  for (const ObservationGroup& g : groups) {
    const std::size_t c = g.urn.kinds();
    const std::vector<double> mu = mean(g.urn, w, guard);
    std::vector<std::vector<double>> d(c, std::vector<double>(c, 0.0));
    if (g.urn.n_hat == 0 || g.urn.n_hat == g.urn.total()) {
      // Forced outcome; mean does not depend on the weights.
    } else if (domain_size_bound(g.urn) <= guard) {
      d = moments(g.urn, w).covariance;
    } else {
      std::vector<double> v(c);
      double v_sum = 0.0;
      for (std::size_t i = 0; i < c; ++i) {
        const double p = g.urn.gamma[i] > 0 ? mu[i] / g.urn.gamma[i] : 0.0;
        v[i] = g.urn.gamma[i] * p * (1.0 - p);
        v_sum += v[i];
      }
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
          d[i][j] = (i == j ? v[i] : 0.0) - v[i] * v[j] / v_sum;
        }
      }
    }
    for (Eigen::Index a = 0; a < free; ++a) {
      const auto i = static_cast<std::size_t>(a) + 1;
      residual[a] += g.count * mu[i] - g.eta_sum[i];
      for (Eigen::Index b = 0; b < free; ++b) {
        jacobian(a, b) += g.count * d[i][static_cast<std::size_t>(b) + 1];
      }
    }
  }
  residual /= n_obs;
  jacobian /= n_obs;
}

EstimationResult estimate_moment(const std::vector<ObservationGroup>& groups,
                                 double n_obs, const EstimationOptions& options) {
  const std::size_t c = groups.front().urn.kinds();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c) - 1);
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
  moment_system(groups, beta, n_obs, options.guard, residual, jacobian);
  EstimationResult result;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (residual.norm() < options.tolerance) break;
    const Eigen::VectorXd step = jacobian.partialPivLu().solve(residual);
    double t = 1.0;
    Eigen::VectorXd candidate;
    Eigen::VectorXd trial_residual;
    Eigen::MatrixXd trial_jacobian;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      candidate = beta - t * step;
      moment_system(groups, candidate, n_obs, options.guard, trial_residual,
                    trial_jacobian);
      if (trial_residual.norm() < residual.norm()) break;
    }
    result.iterations = iter + 1;
    if ((candidate - beta).norm() == 0.0) break;
    beta = candidate;
    residual = trial_residual;
    jacobian = trial_jacobian;
  }
  result.residual_norm = residual.norm();
  if (!(result.residual_norm < options.tolerance)) {
    throw EstimationError("Moment estimator did not reach residual norm " +
                          std::to_string(options.tolerance) + " (got " +
                          std::to_string(result.residual_norm) + ")");
  }
  result.weights = weights_from_log(beta);
  return result;
}

}  // namespace

EstimationResult estimate_weights(const ObservationSet& obs,
                                  EstimationMethod method,
                                  const EstimationOptions& options) {
  const std::vector<ObservationGroup> groups = group_observations(obs);
  check_identifiable(obs);
  const double n_obs = static_cast<double>(obs.size());
  EstimationResult result = method == EstimationMethod::kExactMle
                                ? estimate_mle(groups, n_obs, options)
                                : estimate_moment(groups, n_obs, options);
  result.log_likelihood = log_likelihood(obs, result.weights);
  return result;
}

}  // namespace pmfrank
