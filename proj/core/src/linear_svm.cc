#include "linear_svm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pmfrank/errors.h"
#include "pmfrank/rng.h"

namespace pmfrank::detail {
namespace {

double row_dot(std::span<const double> w, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
  return s;
}

double half_norm_sq(const std::vector<double>& w, double b, bool bias) {
  double s = bias ? b * b : 0.0;
  for (double v : w) s += v * v;
  return 0.5 * s;
}

}  // namespace

HingeSolution solve_hinge(const HingeProblem& problem,
                          const HingeOptions& options) {
  const std::size_t n = problem.rows.size();
  if (problem.labels.size() != n) {
    throw ShapeError("solve_hinge: label count does not match rows");
  }
  if (!(problem.cost > 0.0)) throw DomainError("solve_hinge: cost must be positive");
  const std::size_t dim = n == 0 ? 0 : problem.rows.front().size();
  for (const auto& row : problem.rows) {
    if (row.size() != dim) throw ShapeError("solve_hinge: ragged rows");
  }

  HingeSolution sol;
  sol.weights.assign(dim, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = row_dot(problem.rows[i], problem.rows[i]) + (problem.bias ? 1.0 : 0.0);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.seed);
  const double upper = problem.cost;
  double alpha_sum = 0.0;

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    shuffle(order.begin(), order.end(), rng);
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
      if (diag[i] <= 0.0) continue;
      const double y = problem.labels[i];
      const double margin =
          row_dot(sol.weights, problem.rows[i]) + (problem.bias ? sol.bias : 0.0);
      const double g = y * margin - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == upper) {
        pg = std::max(g, 0.0);
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) <= 1e-12) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / diag[i], 0.0, upper);
      const double delta = (alpha[i] - old) * y;
      if (delta == 0.0) continue;
      alpha_sum += alpha[i] - old;
      const auto row = problem.rows[i];
      for (std::size_t j = 0; j < dim; ++j) sol.weights[j] += delta * row[j];
      if (problem.bias) sol.bias += delta;
    }
    sol.epochs = epoch + 1;
    sol.dual_objective.push_back(half_norm_sq(sol.weights, sol.bias, problem.bias) -
                                 alpha_sum);
    if (n == 0 || pg_max - pg_min < options.tolerance) {
      sol.converged = true;
      break;
    }
  }

  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double margin =
        row_dot(sol.weights, problem.rows[i]) + (problem.bias ? sol.bias : 0.0);
    loss += std::max(0.0, 1.0 - problem.labels[i] * margin);
  }
  sol.primal_objective =
      half_norm_sq(sol.weights, sol.bias, problem.bias) + problem.cost * loss;
  return sol;
}

}  // namespace pmfrank::detail
