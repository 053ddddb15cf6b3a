#pragma once

#include <Eigen/Dense>
#include <vector>

#include "phaseless/types.hpp"

namespace phaseless::est::detail {

// Groups of coordinates sharing one shrinkage magnitude: a complex unknown is
// the pair (Re, Im); a real unknown is a singleton.
using Groups = std::vector<std::vector<int>>;

struct BpdnResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  double objective = 0.0;  // group l1 norm
  int iterations = 0;
};

// min sum_g ||x_g||_2  s.t. ||A x - y||_2 <= eps.
// Solved as the penalized form with FISTA (backtracking line search) and a
// bisection over the penalty to land the residual within 1% of eps.
// Throws EstimatorError when eps is below the least-squares residual.
BpdnResult bpdn_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                      const Groups& groups, double eps,
                      double fixed_point_tol = 1e-8, int max_inner = 4000);

}  // namespace phaseless::est::detail
