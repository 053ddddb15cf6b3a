#include "bpdn.hpp"

#include <algorithm>
#include <cmath>

namespace phaseless::est::detail {
namespace {

void group_shrink(Eigen::VectorXd& x, const Groups& groups, double t) {
  for (const auto& g : groups) {
    double nrm = 0.0;
    for (int idx : g) nrm += x[idx] * x[idx];
    nrm = std::sqrt(nrm);
    const double scale = nrm <= t ? 0.0 : 1.0 - t / nrm;
    for (int idx : g) x[idx] *= scale;
  }
}

double group_l1(const Eigen::VectorXd& x, const Groups& groups) {
  double acc = 0.0;
  for (const auto& g : groups) {
    double nrm = 0.0;
    for (int idx : g) nrm += x[idx] * x[idx];
    acc += std::sqrt(nrm);
  }
  return acc;
}

struct FistaOut {
  Eigen::VectorXd x;
  double residual;
  int iterations;
};

FistaOut fista(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
               const Groups& groups, double mu, Eigen::VectorXd x0,
               double tol, int max_iter, double lip0) {
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd z = x;
  double t = 1.0;
  double lip = lip0;
  auto g_val = [&](const Eigen::VectorXd& v) {
    return 0.5 * (A * v - y).squaredNorm();
  };
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd grad = A.transpose() * (A * z - y);
    const double gz = g_val(z);
    Eigen::VectorXd xn;
    for (int ls = 0; ls < 60; ++ls) {
      xn = z - grad / lip;
      group_shrink(xn, groups, mu / lip);
      const Eigen::VectorXd step = xn - z;
      if (g_val(xn) <= gz + grad.dot(step) + 0.5 * lip * step.squaredNorm()) break;
      lip *= 1.6;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = xn + ((t - 1.0) / tn) * (xn - x);
    const double dx = (xn - x).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, xn.lpNorm<Eigen::Infinity>());
    x = xn;
    t = tn;
    if (dx <= tol * scale) break;
  }
  return {x, (A * x - y).norm(), it};
}

}  // namespace

BpdnResult bpdn_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                      const Groups& groups, double eps, double fixed_point_tol,
                      int max_inner) {
  if (eps < 0) throw ConfigError("bpdn: negative epsilon");
  BpdnResult out;
  out.x = Eigen::VectorXd::Zero(A.cols());
  if (y.norm() <= eps) {
    out.residual = y.norm();
    return out;  // zero is feasible, and l1-minimal
  }

  const Eigen::VectorXd x_ls = A.colPivHouseholderQr().solve(y);
  const double min_res = (A * x_ls - y).norm();
  const double y_scale = y.norm();
  if (eps < min_res - 1e-9 * std::max(1.0, y_scale)) {
    throw EstimatorError("bpdn: infeasible epsilon " + std::to_string(eps) +
                         " < attainable residual " + std::to_string(min_res));
  }

  const double lip0 = std::max(1e-12, A.squaredNorm());  // Frobenius bound
  Eigen::VectorXd grad0 = A.transpose() * y;
  double mu_hi = 0.0;
  for (const auto& g : groups) {
    double nrm = 0.0;
    for (int idx : g) nrm += grad0[idx] * grad0[idx];
    mu_hi = std::max(mu_hi, std::sqrt(nrm));
  }
  if (mu_hi <= 0) return out;

  const double target = std::max(eps, 1e-10 * std::max(1.0, y_scale));
  // Continuation from mu_hi downward until the residual drops below target,
  // then bisect to land within 1% from below.
  double lo = 0.0, hi = mu_hi;
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(A.cols());
  FistaOut sol = fista(A, y, groups, mu_hi, warm, fixed_point_tol, max_inner, lip0);
  int total_it = sol.iterations;
  double mu = mu_hi;
  while (sol.residual > target && mu > 1e-14 * mu_hi) {
    hi = mu;
    mu *= 0.25;
    sol = fista(A, y, groups, mu, sol.x, fixed_point_tol, max_inner, lip0);
    total_it += sol.iterations;
  }
  lo = mu;
  if (eps > 0) {
    for (int step = 0; step < 40; ++step) {
      if (sol.residual >= 0.99 * eps && sol.residual <= eps) break;
      const double mid = 0.5 * (lo + hi);
      FistaOut trial = fista(A, y, groups, mid, sol.x, fixed_point_tol, max_inner, lip0);
      total_it += trial.iterations;
      if (trial.residual > eps) {
        hi = mid;
      } else {
        lo = mid;
        sol = trial;
      }
      if ((hi - lo) <= 1e-12 * mu_hi) break;
    }
  }
  out.x = sol.x;
  out.residual = sol.residual;
  out.objective = group_l1(sol.x, groups);
  out.iterations = total_it;
  return out;
}

}  // namespace phaseless::est::detail
