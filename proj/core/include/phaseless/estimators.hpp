#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phaseless/ofdm.hpp"
#include "phaseless/rng.hpp"
#include "phaseless/signal_core.hpp"
#include "phaseless/types.hpp"

namespace phaseless::est {

using ofdm::OfdmConfig;
using ofdm::PilotSequence;
using ofdm::ProcessedMeasurements;
using signal::ChannelImpulseResponse;

// One-sided autoconvolution estimate: entries 0..2L+1 of the full linear
// autoconvolution a = S0(h) * S0(h) in C^{4L+1}. Entries 0 and 1 are zero,
// the center entry (index 2L+1) is real; the full vector is reconstructed
// through a_k = conj(a_{4L+2-k}).
struct AutoConvolution {
  cvec one_sided;  // length 2L+2
  int l = 0;

  cvec full() const;
};

struct EstimatorReport {
  ChannelImpulseResponse h_hat;
  bool sign_resolved = false;
  int iterations = 0;
  double residual = 0.0;
  double stage1_residual = 0.0;
};

// Tunable knobs; negative values mean "derive from the noise level".
struct EstimatorKnobs {
  double tau = -1.0;         // Tikhonov weight (classical: sigma^2)
  double eps_eff = -1.0;     // BPDN residual bound on b^2
  double eps_classical = -1.0;
  double lambda = -1.0;      // hard threshold level for the autoconvolution
  double sigma2_eff = -1.0;  // per-coordinate variance of b^2 - z
  double alpha = 0.01;       // de-autoconvolution regularization weight
  double omega = 4.0;        // reweighting exponent
  int k_prun = -1;           // pruning width, default ceil(3S/2)
  double lambda_l1 = 0.1;    // sparse promoting weight for the lifted path
};

// --- classical pilot-aided baselines -------------------------------------

// A^(c) = sqrt(P) diag(u) F_P (. ; 0): entries u_k w_P^{km}.
cvec classical_ls(const cvec& rhat_pilots, const PilotSequence& pilots,
                  const OfdmConfig& cfg, double tau);

cvec classical_bpdn(const cvec& rhat_pilots, const PilotSequence& pilots,
                    const OfdmConfig& cfg, double eps);

// --- phaseless two-stage path ---------------------------------------------

AutoConvolution autoconv_ls(const ProcessedMeasurements& meas,
                            const OfdmConfig& cfg, double tau);

AutoConvolution autoconv_bpdn(const ProcessedMeasurements& meas,
                              const OfdmConfig& cfg, double eps_eff);

// Entries 2..L+1 of the one-sided vector: the pure (h*h)_{0..L-1} region the
// recursion consumes.
cvec extract_h_segment(const AutoConvolution& a);

// Keeps index 0 unconditionally; zeroes entries k>0 with |a_k| < lambda.
cvec threshold_autoconv(const cvec& a_seg, double lambda);

// 0.1 * sqrt(sigma2_eff * (4L+1)).
double universal_threshold(double sigma2_eff, int l);

struct DeautoconvOptions {
  double alpha = 0.01;
  double omega = 4.0;
  int k_prun = 0;  // 0 means ceil(3S/2)
  int max_inner = 50;
  double grad_tol = 1e-9;
};

// Iterative regularized de-autoconvolution; output is determined up to a
// global sign. Throws EstimatorError when the leading coefficient vanishes.
ChannelImpulseResponse deautoconvolve(const cvec& a_thr, const OfdmConfig& cfg,
                                      const DeautoconvOptions& opts);

// --- sign resolution and demodulation --------------------------------------

// One pilot tone whose phase is known at the receiver, plus the observation
// of that tone in the first symbol's combined spectrum.
struct SignReference {
  int tone = 0;  // absolute subcarrier index in [N]
  cplx observed = 0.0;
  cplx pilot_value = 0.0;
  int n = 0;
};

struct SignDecision {
  ChannelImpulseResponse h;
  bool ambiguous = false;
};

SignDecision resolve_sign(const ChannelImpulseResponse& h_pm,
                          const SignReference& ref);

enum class Transfer {
  direct,        // sqrt(N) F (h; 0)          — classical window
  shifted,       // sqrt(N) F (0, h, 0)        — phaseless symbol 1
  shifted_conj,  // conj of the above          — phaseless symbol 2
};

struct DemodResult {
  std::vector<std::uint8_t> bits;
  int erasures = 0;
};

// Zero-forcing equalization of the data tones followed by minimum-distance
// demapping. Tones with a vanishing transfer coefficient become erasures
// (random bits drawn from rng, counted).
DemodResult equalize_and_demod(const cvec& rhat_data,
                               const ChannelImpulseResponse& h_hat,
                               const OfdmConfig& cfg, Transfer transfer,
                               Rng& rng);

// Channel transfer values on the data tones for the given convention.
cvec transfer_on_data_tones(const ChannelImpulseResponse& h_hat,
                            const OfdmConfig& cfg, Transfer transfer);

// --- noise-calibrated defaults ---------------------------------------------

// Heuristic bound on ||b^2 - z||_2 from the Rayleigh moments of the per-tone
// noise (variance 2 sigma2 after combining) and the measured b.
double default_eps_eff(const ProcessedMeasurements& b,
                       const PilotSequence& pilots, double sigma2);

// Per-coordinate variance of the residual b^2 - z, same moment model.
double default_sigma2_eff(const ProcessedMeasurements& b,
                          const PilotSequence& pilots, double sigma2);

// --- end-to-end phaseless pipeline ------------------------------------------

enum class Stage1 { ls, bpdn };

EstimatorReport phaseless_estimate(const ProcessedMeasurements& meas,
                                   const OfdmConfig& cfg, Stage1 stage1,
                                   const EstimatorKnobs& knobs, double sigma2,
                                   const PilotSequence& pilots,
                                   const std::optional<SignReference>& ref);

}  // namespace phaseless::est
