#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pmfrank::detail {

// L1-loss (hinge) linear SVM in the form
//   min_w  1/2 |w|^2 + cost * sum_i max(0, 1 - y_i <w, x_i>)
// solved by dual coordinate descent. With `bias` the samples are augmented
// by a constant 1 feature, so the bias is regularized together with w.
struct HingeProblem {
  std::vector<std::span<const double>> rows;
  std::vector<double> labels;  // +1 / -1
  double cost = 1.0;
  bool bias = true;
};

struct HingeOptions {
  // Stop once max - min projected gradient over an epoch falls below this.
  double tolerance = 1e-3;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
};

struct HingeSolution {
  std::vector<double> weights;
  double bias = 0.0;
  // Dual objective 1/2 |w|^2 - sum(alpha) after each epoch. Coordinate
  // descent minimizes it exactly per coordinate, so it never increases.
  std::vector<double> dual_objective;
  double primal_objective = 0.0;
  int epochs = 0;
  bool converged = false;
};

HingeSolution solve_hinge(const HingeProblem& problem,
                          const HingeOptions& options);

}  // namespace pmfrank::detail
