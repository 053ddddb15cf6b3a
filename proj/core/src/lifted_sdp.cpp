#include "phaseless/lifted_sdp.hpp"

#include <cmath>
#include <numbers>

namespace phaseless::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

rvec LiftedOperator::forward(const MatrixXd& g) const {
  rvec out(p);
  for (int k = 0; k < p; ++k) out[k] = v.row(k) * g * v.row(k).transpose();
  return out;
}

MatrixXd LiftedOperator::adjoint(const rvec& y) const {
  MatrixXd acc = MatrixXd::Zero(2 * l, 2 * l);
  for (int k = 0; k < p; ++k) acc += y[k] * sensing[std::size_t(k)];
  return acc;
}

rvec LiftedOperator::forward_vector(const rvec& g) const {
  rvec out(p);
  for (int k = 0; k < p; ++k) {
    double dot = 0.0;
    for (int m = 0; m < 2 * l; ++m) dot += v(k, m) * g[m];
    out[k] = dot * dot;
  }
  return out;
}

LiftedOperator build_lifting_map(int p, int l) {
  if (p < 4 * l + 2) throw ConfigError("build_lifting_map: need P >= 4L+2");
  LiftedOperator op;
  op.p = p;
  op.l = l;
  op.v.resize(p, 2 * l);
  const double scale = 2.0 / std::sqrt(double(p));
  for (int k = 0; k < p; ++k) {
    for (int m = 0; m < l; ++m) {
      const double ang = 2.0 * std::numbers::pi * double(k) * double(m + 1) / double(p);
      op.v(k, m) = scale * std::cos(ang);
      op.v(k, l + m) = scale * std::sin(ang);
    }
  }
  op.sensing.reserve(p);
  for (int k = 0; k < p; ++k)
    op.sensing.push_back(op.v.row(k).transpose() * op.v.row(k));
  return op;
}

LiftedOperator build_lifting_map(const OfdmConfig& cfg) {
  cfg.validate(true);
  return build_lifting_map(cfg.p, cfg.l);
}

namespace {

MatrixXd symmetrize_mat(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Projection onto {W : ||z - A(W)||_2 <= eps} along the adjoint directions.
struct SlabProjector {
  const LiftedOperator& op;
  MatrixXd amat;      // P x (2L)^2, rows are vec(M_k)
  Eigen::LDLT<MatrixXd> gram;

  explicit SlabProjector(const LiftedOperator& o) : op(o) {
    const int n = 2 * o.l;
    amat.resize(o.p, n * n);
    for (int k = 0; k < o.p; ++k) {
      const MatrixXd& mk = o.sensing[std::size_t(k)];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) amat(k, i * n + j) = mk(i, j);
    }
    MatrixXd g = amat * amat.transpose();
    g.diagonal().array() += 1e-12;
    gram.compute(g);
  }

  MatrixXd project(const MatrixXd& w, const rvec& z, double eps) const {
    const int n = 2 * op.l;
    VectorXd aw(op.p);
    const rvec f = op.forward(w);
    for (int k = 0; k < op.p; ++k) aw[k] = z[k] - f[k];
    const double nd = aw.norm();
    if (nd <= eps) return w;
    const VectorXd corr = gram.solve(aw * (1.0 - eps / nd));
    MatrixXd out = w;
    for (int k = 0; k < op.p; ++k) out += corr[k] * op.sensing[std::size_t(k)];
    return symmetrize_mat(out);
  }
};

}  // namespace

PsdSolution solve_trace_min(const rvec& z, const LiftedOperator& op,
                            double eps_eff, double lambda_l1,
                            const TraceMinOptions& opts) {
  if (eps_eff < 0 || lambda_l1 < 0)
    throw ConfigError("solve_trace_min: negative eps_eff or lambda_l1");
  if (int(z.size()) != op.p) throw ConfigError("solve_trace_min: z length != P");
  for (double v : z)
    if (v < -1e-12) throw ConfigError("solve_trace_min: negative measurement");

  const int n = 2 * op.l;
  const double rho = opts.rho;
  SlabProjector slab(op);

  MatrixXd x1 = MatrixXd::Zero(n, n), x2 = x1, x3 = x1;
  MatrixXd u1 = x1, u2 = x1, u3 = x1;
  MatrixXd zbar = x1;
  double pr = 0.0, dr = 0.0;
  double zscale = 1e-12;
  for (double v : z) zscale = std::max(zscale, std::abs(v));

  PsdSolution best;
  best.primal_residual = std::numeric_limits<double>::infinity();

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // trace + PSD block: eigenvalue shift and clamp
    {
      MatrixXd w = symmetrize_mat(zbar - u1);
      w.diagonal().array() -= 1.0 / rho;
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(w);
      VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
      x1 = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    }
    // elementwise l1 block
    {
      const MatrixXd w = zbar - u2;
      const double t = lambda_l1 / rho;
      x2 = w.unaryExpr([t](double v) {
        return v > t ? v - t : (v < -t ? v + t : 0.0);
      });
    }
    // measurement slab block
    x3 = slab.project(symmetrize_mat(zbar - u3), z, eps_eff);

    const MatrixXd zold = zbar;
    zbar = (x1 + u1 + x2 + u2 + x3 + u3) / 3.0;
    u1 += x1 - zbar;
    u2 += x2 - zbar;
    u3 += x3 - zbar;

    pr = std::max({(x1 - zbar).norm(), (x2 - zbar).norm(), (x3 - zbar).norm()});
    dr = rho * (zbar - zold).norm();
    const double scale = std::max(1.0, zbar.norm());
    if (pr < best.primal_residual) {
      best.g = zbar;
      best.primal_residual = pr;
      best.dual_residual = dr;
    }
    if (pr <= opts.tol * scale && dr <= opts.tol * scale) {
      ++it;
      break;
    }
  }

  PsdSolution out;
  out.g = symmetrize_mat(best.g);
  // Final polish: clamp to the PSD cone so downstream eigen-extraction sees
  // min eigenvalue >= -tol * ||G||.
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(out.g);
    VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
    out.g = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    const double top = ev.maxCoeff();
    out.rank_at_tol = 0;
    for (int i = 0; i < ev.size(); ++i)
      if (ev[i] > 1e-6 * std::max(top, 1e-300)) ++out.rank_at_tol;
  }
  out.trace = out.g.trace();
  out.primal_residual = best.primal_residual;
  out.dual_residual = best.dual_residual;
  out.iterations = it;
  const double scale = std::max(1.0, out.g.norm());
  out.converged = best.primal_residual <= opts.tol * scale;
  return out;
}

Rank1Extraction extract_rank1(const PsdSolution& sol) {
  const int n = int(sol.g.rows());
  const int l = n / 2;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sol.g);
  const VectorXd& ev = eig.eigenvalues();  // ascending
  const double s1 = std::max(ev[n - 1], 0.0);
  const double s2 = n >= 2 ? std::max(ev[n - 2], 0.0) : 0.0;
  Rank1Extraction out;
  out.h.taps.assign(l, 0.0);
  if (s1 <= 0.0) {
    out.defect = 0.0;
    return out;  // zero channel
  }
  const VectorXd g = std::sqrt(s1) * eig.eigenvectors().col(n - 1);
  for (int m = 0; m < l; ++m) out.h.taps[m] = {g[m], g[l + m]};
  out.defect = s2 / s1;
  return out;
}

}  // namespace phaseless::sdp
