#pragma once

#include <Eigen/Dense>
#include <vector>

#include "phaseless/ofdm.hpp"
#include "phaseless/signal_core.hpp"
#include "phaseless/types.hpp"

namespace phaseless::sdp {

using ofdm::OfdmConfig;
using signal::ChannelImpulseResponse;

// Real linear map A: symmetric 2L x 2L matrices -> R^P with
// A(G)_k = v_k^T G v_k, where v_k is the k-th sensing vector
// (2/sqrt(P)) (cos(2 pi k (m+1)/P)_m, sin(2 pi k (m+1)/P)_m).
// For the rank-1 lift G = g g^T this reproduces |F_P Lambda g|^2.
struct LiftedOperator {
  Eigen::MatrixXd v;                     // P x 2L sensing vectors (rows)
  std::vector<Eigen::MatrixXd> sensing;  // materialized M_k = v_k v_k^T
  int p = 0;
  int l = 0;

  rvec forward(const Eigen::MatrixXd& g) const;
  Eigen::MatrixXd adjoint(const rvec& y) const;
  rvec forward_vector(const rvec& g) const;  // A(g g^T)
};

LiftedOperator build_lifting_map(const OfdmConfig& cfg);
LiftedOperator build_lifting_map(int p, int l);

struct PsdSolution {
  Eigen::MatrixXd g;
  double trace = 0.0;
  int rank_at_tol = 0;  // eigenvalues above 1e-6 relative
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct TraceMinOptions {
  double rho = 1.0;
  int max_iter = 5000;
  double tol = 1e-6;
};

// min tr(G) + lambda_l1 ||G||_1  s.t.  ||z - A(G)||_2 <= eps_eff,  G psd.
// Consensus ADMM alternating PSD/trace, elementwise shrinkage, and the
// projection onto the measurement slab. Non-convergence is reported in the
// returned diagnostics, never silently.
PsdSolution solve_trace_min(const rvec& z, const LiftedOperator& op,
                            double eps_eff, double lambda_l1,
                            const TraceMinOptions& opts = {});

struct Rank1Extraction {
  ChannelImpulseResponse h;
  double defect = 0.0;  // sigma_2 / sigma_1 of the PSD solution
};

Rank1Extraction extract_rank1(const PsdSolution& sol);

}  // namespace phaseless::sdp
