#include "phaseless/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "bpdn.hpp"

namespace phaseless::est {

using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using Eigen::VectorXcd;
using signal::lin_conv;

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXcd classical_matrix(const PilotSequence& pilots, const OfdmConfig& cfg) {
  const int p = cfg.p, l = cfg.l;
  MatrixXcd a(p, l);
  for (int k = 0; k < p; ++k) {
    for (int m = 0; m < l; ++m) {
      const double ang = -2.0 * kPi * double(k) * double(m) / double(p);
      a(k, m) = pilots.values[k] * cplx{std::cos(ang), std::sin(ang)};
    }
  }
  return a;
}

// Realification [Re A, -Im A; Im A, Re A] acting on [Re x; Im x].
MatrixXd realify(const MatrixXcd& a) {
  const int r = int(a.rows()), c = int(a.cols());
  MatrixXd out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = a.real();
  out.topRightCorner(r, c) = -a.imag();
  out.bottomLeftCorner(r, c) = a.imag();
  out.bottomRightCorner(r, c) = a.real();
  return out;
}

VectorXd realify(const cvec& v) {
  const int n = int(v.size());
  VectorXd out(2 * n);
  for (int i = 0; i < n; ++i) {
    out[i] = v[i].real();
    out[n + i] = v[i].imag();
  }
  return out;
}

// Design matrix of the stage-1 linear model: the centered one-sided
// autoconvolution c (c_0 real, c_1..c_2L complex) maps to the processed
// measurements through z_k = (c_0 + 2 sum_j Re(c_j w^{kj})) / P.
// Columns: [c_0, Re c_1..Re c_2L, Im c_1..Im c_2L].
MatrixXd stage1_design(int p, int l) {
  const int m = 2 * l;
  MatrixXd d(p, 2 * m + 1);
  for (int k = 0; k < p; ++k) {
    d(k, 0) = 1.0 / p;
    for (int j = 1; j <= m; ++j) {
      const double ang = 2.0 * kPi * double(k) * double(j) / double(p);
      d(k, j) = 2.0 * std::cos(ang) / p;
      d(k, m + j) = 2.0 * std::sin(ang) / p;
    }
  }
  return d;
}

// Centered one-sided autoconvolution c_k, k = 0..2L, of the symmetrized
// support (conj(h)_-, 0, h): c_k = sum_{m+m'=k} u_m u_{m'} over m in [-L, L].
cvec centered_autoconv(const cvec& h) {
  const int l = int(h.size());
  auto u = [&](int m) -> cplx {
    if (m > 0 && m <= l) return h[m - 1];
    if (m < 0 && -m <= l) return std::conj(h[-m - 1]);
    return 0.0;
  };
  cvec c(2 * l + 1, 0.0);
  for (int k = 0; k <= 2 * l; ++k) {
    cplx acc = 0.0;
    for (int m = -l; m <= l; ++m) {
      const int mp = k - m;
      if (mp < -l || mp > l) continue;
      acc += u(m) * u(mp);
    }
    c[k] = acc;
  }
  return c;
}

// Directional derivative of centered_autoconv: the map h -> u is real-linear,
// so d c(h)[delta] = 2 * sum_{m+m'=k} u_m(h) u_{m'}(delta).
cvec centered_autoconv_dir(const cvec& h, const cvec& delta) {
  const int l = int(h.size());
  auto uh = [&](int m) -> cplx {
    if (m > 0 && m <= l) return h[m - 1];
    if (m < 0 && -m <= l) return std::conj(h[-m - 1]);
    return 0.0;
  };
  auto ud = [&](int m) -> cplx {
    if (m > 0 && m <= l) return delta[m - 1];
    if (m < 0 && -m <= l) return std::conj(delta[-m - 1]);
    return 0.0;
  };
  cvec out(2 * l + 1, 0.0);
  for (int k = 0; k <= 2 * l; ++k) {
    cplx acc = 0.0;
    for (int m = -l; m <= l; ++m) {
      const int mp = k - m;
      if (mp < -l || mp > l) continue;
      acc += uh(m) * ud(mp);
    }
    out[k] = 2.0 * acc;
  }
  return out;
}

VectorXd centered_residual(const cvec& model, const cvec& target) {
  const int m = int(target.size()) - 1;
  VectorXd r(2 * m + 1);
  r[0] = model[0].real() - target[0].real();
  for (int j = 1; j <= m; ++j) {
    r[2 * j - 1] = model[j].real() - target[j].real();
    r[2 * j] = model[j].imag() - target[j].imag();
  }
  return r;
}

// Levenberg-Marquardt fit of h to a centered autoconvolution target.
struct CenteredFit {
  cvec h;
  double residual = 0.0;
  int iterations = 0;
};

CenteredFit refine_centered(cvec h, const cvec& target, int max_iter = 120) {
  const int l = int(h.size());
  const int rows = int(target.size()) * 2 - 1;
  double mu = 1e-8;
  cvec model = centered_autoconv(h);
  VectorXd res = centered_residual(model, target);
  double cost = res.squaredNorm();
  int it = 0;
  for (; it < max_iter; ++it) {
    MatrixXd jac(rows, 2 * l);
    for (int j = 0; j < 2 * l; ++j) {
      cvec delta(l, 0.0);
      delta[j % l] = (j < l) ? cplx{1.0, 0.0} : cplx{0.0, 1.0};
      const cvec dcol = centered_autoconv_dir(h, delta);
      jac(0, j) = dcol[0].real();
      for (int q = 1; q < int(target.size()); ++q) {
        jac(2 * q - 1, j) = dcol[q].real();
        jac(2 * q, j) = dcol[q].imag();
      }
    }
    const VectorXd grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, cost)) break;
    const MatrixXd jtj = jac.transpose() * jac;
    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      MatrixXd lhs = jtj;
      lhs.diagonal().array() += mu;
      const VectorXd step = lhs.ldlt().solve(-grad);
      cvec hn(l);
      for (int m = 0; m < l; ++m)
        hn[m] = h[m] + cplx{step[m], step[l + m]};
      const cvec mn = centered_autoconv(hn);
      const VectorXd rn = centered_residual(mn, target);
      if (rn.squaredNorm() < cost) {
        h = std::move(hn);
        model = mn;
        res = rn;
        cost = res.squaredNorm();
        mu = std::max(mu * 0.3, 1e-12);
        stepped = true;
        break;
      }
      mu *= 10.0;
    }
    if (!stepped) break;
    if (cost <= 1e-28) break;
  }
  return {std::move(h), std::sqrt(cost), it};
}

// Descending coefficient recursion: the top entries c_{k}, k > d+..., of the
// centered autoconvolution are pure convolution coefficients (h*h)_{k-2},
// so h can be peeled from the top support index d downward.
cvec descend_from_degree(const cvec& c, int l, int d) {
  cvec h(l, 0.0);
  if (d < 0) return h;
  const cplx lead = c[2 * d + 2];
  h[d] = std::sqrt(lead);
  if (std::abs(h[d]) < 1e-300) return h;
  for (int s = 2 * d - 1; s >= d; --s) {
    const int i = s - d;
    cplx rest = 0.0;
    for (int a = i + 1; a <= d; ++a) {
      const int b = s - a;
      if (b < 0 || b > d || a >= b) continue;
      rest += 2.0 * h[a] * h[b];
    }
    if (s % 2 == 0 && s / 2 > i && s / 2 <= d) rest += h[s / 2] * h[s / 2];
    h[i] = (c[s + 2] - rest) / (2.0 * h[d]);
  }
  return h;
}

// Factorization of a (possibly noisy) centered autoconvolution estimate into
// a channel, up to global sign: descending recursion for candidate effective
// degrees, then a damped Gauss-Newton polish; best data fit wins.
CenteredFit centered_to_channel(const cvec& c, int l, double noise_floor) {
  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return {cvec(l, 0.0), 0.0, 0};
  const double floor = std::max(noise_floor, 1e-12 * scale);

  int d_hat = 0;
  for (int d = l - 1; d >= 0; --d) {
    if (std::abs(c[2 * d + 2]) + std::abs(c[2 * d + 1]) >= floor) {
      d_hat = d;
      break;
    }
  }
  std::vector<int> candidates{d_hat};
  if (d_hat + 1 <= l - 1) candidates.push_back(d_hat + 1);
  if (l - 1 != d_hat && l - 1 != d_hat + 1) candidates.push_back(l - 1);

  CenteredFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int d : candidates) {
    CenteredFit fit = refine_centered(descend_from_degree(c, l, d), c);
    if (fit.residual < best.residual) best = std::move(fit);
  }
  return best;
}

cvec one_sided_from_channel(const cvec& h) {
  const int l = int(h.size());
  ChannelImpulseResponse ch{h, 0};
  const cvec t = signal::symmetrize(ch, 0).entries;  // (0, h, conj h reversed)
  cvec a = lin_conv(t, t);
  a.resize(2 * l + 2);
  return a;
}

VectorXd squared_values(const ProcessedMeasurements& meas) {
  VectorXd b2(int(meas.values.size()));
  for (int i = 0; i < b2.size(); ++i) {
    const double v = meas.values[i];
    b2[i] = meas.kind == ProcessedMeasurements::Kind::squared ? v : v * v;
  }
  return b2;
}

struct Stage1Fit {
  cvec c;               // centered one-sided estimate
  double residual = 0;  // ||b^2 - model||_2
};

cvec centered_from_theta(const VectorXd& theta, int l) {
  const int m = 2 * l;
  cvec c(m + 1);
  c[0] = theta[0];
  for (int j = 1; j <= m; ++j) c[j] = {theta[j], theta[m + j]};
  return c;
}

AutoConvolution finish_stage1(const Stage1Fit& fit, const OfdmConfig& cfg,
                              double noise_floor) {
  const CenteredFit ch = centered_to_channel(fit.c, cfg.l, noise_floor);
  return {one_sided_from_channel(ch.h), cfg.l};
}

double stage1_noise_floor(const OfdmConfig& cfg, double sigma2_eff) {
  // Coefficient noise after the near-orthogonal LS: var ~ P * sigma2_eff / 2.
  if (sigma2_eff <= 0) return 0.0;
  return 3.0 * std::sqrt(0.5 * cfg.p * sigma2_eff);
}

}  // namespace

cvec AutoConvolution::full() const {
  const int m = 4 * l + 1;
  cvec a(m, 0.0);
  for (int k = 0; k < int(one_sided.size()); ++k) a[k] = one_sided[k];
  for (int k = 2 * l + 2; k <= 4 * l; ++k) a[k] = std::conj(a[4 * l + 2 - k]);
  return a;
}

cvec classical_ls(const cvec& rhat_pilots, const PilotSequence& pilots,
                  const OfdmConfig& cfg, double tau) {
  if (tau < 0) throw ConfigError("classical_ls: negative tau");
  cfg.validate(false);
  if (int(rhat_pilots.size()) != cfg.p)
    throw ConfigError("classical_ls: observation length != P");
  const MatrixXcd a = classical_matrix(pilots, cfg);
  VectorXcd y(cfg.p);
  for (int i = 0; i < cfg.p; ++i) y[i] = rhat_pilots[i];
  MatrixXcd lhs = a.adjoint() * a;
  lhs.diagonal().array() += tau;
  const VectorXcd h = lhs.ldlt().solve(a.adjoint() * y);
  return cvec(h.data(), h.data() + cfg.l);
}

cvec classical_bpdn(const cvec& rhat_pilots, const PilotSequence& pilots,
                    const OfdmConfig& cfg, double eps) {
  cfg.validate(false);
  if (int(rhat_pilots.size()) != cfg.p)
    throw ConfigError("classical_bpdn: observation length != P");
  const MatrixXd a = realify(classical_matrix(pilots, cfg));
  const VectorXd y = realify(rhat_pilots);
  detail::Groups groups;
  for (int m = 0; m < cfg.l; ++m) groups.push_back({m, cfg.l + m});
  const auto sol = detail::bpdn_solve(a, y, groups, eps);
  cvec h(cfg.l);
  for (int m = 0; m < cfg.l; ++m) h[m] = {sol.x[m], sol.x[cfg.l + m]};
  return h;
}

AutoConvolution autoconv_ls(const ProcessedMeasurements& meas,
                            const OfdmConfig& cfg, double tau) {
  if (tau < 0) throw ConfigError("autoconv_ls: negative tau");
  cfg.validate(true);
  if (int(meas.values.size()) != cfg.p)
    throw ConfigError("autoconv_ls: measurement length != P");
  const MatrixXd m = stage1_design(cfg.p, cfg.l);
  const VectorXd b2 = squared_values(meas);
  MatrixXd lhs = m.transpose() * m;
  lhs.diagonal().array() += tau;
  const VectorXd theta = lhs.ldlt().solve(m.transpose() * b2);
  Stage1Fit fit{centered_from_theta(theta, cfg.l), (m * theta - b2).norm()};
  return finish_stage1(fit, cfg, 0.0);
}

AutoConvolution autoconv_bpdn(const ProcessedMeasurements& meas,
                              const OfdmConfig& cfg, double eps_eff) {
  if (eps_eff < 0) throw ConfigError("autoconv_bpdn: negative eps_eff");
  cfg.validate(true);
  if (int(meas.values.size()) != cfg.p)
    throw ConfigError("autoconv_bpdn: measurement length != P");
  const MatrixXd m = stage1_design(cfg.p, cfg.l);
  const VectorXd b2 = squared_values(meas);
  detail::Groups groups;
  groups.push_back({0});
  for (int j = 1; j <= 2 * cfg.l; ++j) groups.push_back({j, 2 * cfg.l + j});
  const auto sol = detail::bpdn_solve(m, b2, groups, eps_eff);
  Stage1Fit fit{centered_from_theta(sol.x, cfg.l), sol.residual};
  return finish_stage1(fit, cfg, 0.0);
}

cvec extract_h_segment(const AutoConvolution& a) {
  if (int(a.one_sided.size()) != 2 * a.l + 2)
    throw ConfigError("extract_h_segment: malformed one-sided vector");
  return cvec(a.one_sided.begin() + 2, a.one_sided.begin() + 2 + a.l);
}

cvec threshold_autoconv(const cvec& a_seg, double lambda) {
  if (lambda < 0) throw ConfigError("threshold_autoconv: negative lambda");
  cvec out = a_seg;
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (std::abs(out[k]) < lambda) out[k] = 0.0;
  }
  return out;
}

double universal_threshold(double sigma2_eff, int l) {
  return 0.1 * std::sqrt(sigma2_eff * (4.0 * l + 1.0));
}

namespace {

// (h*h)_l restricted to the first k+1 taps.
cplx conv_coeff(const cvec& h, int l) {
  cplx acc = 0.0;
  for (int a = 0; a <= l; ++a) {
    if (a >= int(h.size()) || l - a >= int(h.size())) continue;
    acc += h[a] * h[l - a];
  }
  return acc;
}

// Local Tikhonov-regularized refit of taps 0..k against the segment values
// a_0..a_k. The objective is
//   sum_{l<=k} |a_l - (h*h)_l|^2 + alpha * sum_{l<=k} w_l^2 |h_l|^2,
// w_l = exp(-(k-l) omega): full weight on the current coefficient, older
// ones released exponentially (see notes on the reweighting convention).
int local_update(cvec& h, const cvec& a, int k, double alpha, double omega,
                 int max_inner, double grad_tol) {
  const int nact = k + 1;
  rvec w(nact);
  for (int l = 0; l < nact; ++l) w[l] = std::exp(-double(k - l) * omega);

  auto objective = [&](const cvec& v) {
    double acc = 0.0;
    for (int l = 0; l <= k; ++l) acc += std::norm(a[l] - conv_coeff(v, l));
    for (int l = 0; l <= k; ++l) acc += alpha * w[l] * w[l] * std::norm(v[l]);
    return acc;
  };

  double cost = objective(h);
  double mu = 1e-9;
  int it = 0;
  for (; it < max_inner; ++it) {
    // Complex Jacobian of the data part: d(h*h)_l / dh_m = 2 h_{l-m}.
    MatrixXcd jac = MatrixXcd::Zero(nact, nact);
    VectorXcd res(nact);
    for (int l = 0; l <= k; ++l) {
      res[l] = a[l] - conv_coeff(h, l);
      for (int m = 0; m <= l; ++m) jac(l, m) = 2.0 * h[l - m];
    }
    VectorXcd grad = jac.adjoint() * res;
    for (int l = 0; l <= k; ++l) grad[l] -= alpha * w[l] * w[l] * h[l];
    if (grad.lpNorm<Eigen::Infinity>() <= grad_tol) break;

    MatrixXcd base = jac.adjoint() * jac;
    for (int l = 0; l <= k; ++l) base(l, l) += alpha * w[l] * w[l];
    bool stepped = false;
    for (int attempt = 0; attempt < 20; ++attempt) {
      MatrixXcd lhs = base;
      lhs.diagonal().array() += mu;
      const VectorXcd step = lhs.ldlt().solve(grad);
      cvec hn = h;
      for (int l = 0; l <= k; ++l) hn[l] += step[l];
      const double cn = objective(hn);
      if (cn <= cost) {
        h = std::move(hn);
        cost = cn;
        mu = std::max(mu * 0.3, 1e-12);
        stepped = true;
        break;
      }
      mu *= 10.0;
    }
    if (!stepped) break;
  }
  return it;
}

void prune_to(cvec& h, int keep, bool protect_first) {
  const int n = int(h.size());
  if (keep >= n) return;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(h[a]) > std::abs(h[b]);
  });
  std::vector<bool> keep_mask(n, false);
  int kept = 0;
  if (protect_first) {
    keep_mask[0] = true;
    kept = 1;
  }
  for (int i = 0; i < n && kept < keep; ++i) {
    if (!keep_mask[idx[i]]) {
      keep_mask[idx[i]] = true;
      ++kept;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!keep_mask[i]) h[i] = 0.0;
}

}  // namespace

ChannelImpulseResponse deautoconvolve(const cvec& a_thr, const OfdmConfig& cfg,
                                      const DeautoconvOptions& opts) {
  if (opts.alpha < 0) throw ConfigError("deautoconvolve: negative alpha");
  const int l = cfg.l;
  if (int(a_thr.size()) != l)
    throw ConfigError("deautoconvolve: segment length != L");
  double scale = 0.0;
  for (const auto& v : a_thr) scale = std::max(scale, std::abs(v));
  if (std::abs(a_thr[0]) <= 1e-14 * std::max(1.0, scale))
    throw EstimatorError(
        "deautoconvolve: leading autoconvolution coefficient is (near) zero; "
        "h_0 cannot be determined");

  // Rotate so a_0 is real positive; the half-phase is restored at the end.
  const double phi = std::arg(a_thr[0]);
  const cplx derot = std::polar(1.0, -phi);
  cvec a(l);
  for (int i = 0; i < l; ++i) a[i] = a_thr[i] * derot;

  const int k_prun = opts.k_prun > 0 ? opts.k_prun : (3 * cfg.s + 1) / 2;
  cvec h(l, 0.0);
  h[0] = std::sqrt(a[0].real());

  for (int k = 1; k < l; ++k) {
    cplx acc = 0.0;
    for (int m = 1; m < k; ++m) acc += h[m] * h[k - m];
    h[k] = (a[k] - acc) / (2.0 * h[0]);
    local_update(h, a, k, opts.alpha, opts.omega, opts.max_inner, opts.grad_tol);
    prune_to(h, k_prun, /*protect_first=*/true);
    if (std::abs(h[0]) <= 1e-300)
      throw EstimatorError("deautoconvolve: leading tap vanished mid-recursion");
  }
  prune_to(h, cfg.s, /*protect_first=*/false);

  const cplx rot = std::polar(1.0, phi / 2.0);
  for (auto& v : h) v *= rot;
  return {std::move(h), cfg.s};
}

SignDecision resolve_sign(const ChannelImpulseResponse& h_pm,
                          const SignReference& ref) {
  const int l = h_pm.length();
  cplx transfer = 0.0;
  for (int j = 1; j <= l; ++j) {
    const double ang = -2.0 * kPi * double(ref.tone) * double(j) / double(ref.n);
    transfer += h_pm.taps[j - 1] * cplx{std::cos(ang), std::sin(ang)};
  }
  const cplx model = std::sqrt(double(ref.n)) * transfer * ref.pilot_value;
  const double d_plus = std::abs(ref.observed - model);
  const double d_minus = std::abs(ref.observed + model);
  SignDecision out{h_pm, false};
  if (d_minus < d_plus) {
    for (auto& v : out.h.taps) v = -v;
  } else if (d_minus == d_plus) {
    out.ambiguous = true;  // keep +
  }
  return out;
}

cvec transfer_on_data_tones(const ChannelImpulseResponse& h_hat,
                            const OfdmConfig& cfg, Transfer transfer) {
  cvec padded(cfg.n, 0.0);
  const int off = transfer == Transfer::direct ? 0 : 1;
  for (int i = 0; i < h_hat.length() && i + off < cfg.n; ++i)
    padded[i + off] = h_hat.taps[i];
  cvec spec = signal::dft(padded);
  const double root_n = std::sqrt(double(cfg.n));
  cvec out;
  out.reserve(cfg.data_tones());
  const int d = cfg.d();
  for (int k = 0; k < cfg.n; ++k) {
    if (k % d == 0) continue;
    cplx t = root_n * spec[k];
    if (transfer == Transfer::shifted_conj) t = std::conj(t);
    out.push_back(t);
  }
  return out;
}

DemodResult equalize_and_demod(const cvec& rhat_data,
                               const ChannelImpulseResponse& h_hat,
                               const OfdmConfig& cfg, Transfer transfer,
                               Rng& rng) {
  if (int(rhat_data.size()) != cfg.data_tones())
    throw ConfigError("equalize_and_demod: data tone count mismatch");
  const cvec t = transfer_on_data_tones(h_hat, cfg, transfer);
  const int bps = ofdm::bits_per_symbol(cfg.modulation);
  DemodResult out;
  out.bits.resize(cfg.payload_bits());
  double tmax = 0.0;
  for (const auto& v : t) tmax = std::max(tmax, std::abs(v));
  const double floor = 1e-12 * std::max(1.0, tmax);
  for (int d = 0; d < cfg.data_tones(); ++d) {
    std::uint8_t* bits = out.bits.data() + std::size_t(d) * bps;
    if (std::abs(t[d]) <= floor) {
      ++out.erasures;
      for (int b = 0; b < bps; ++b) bits[b] = rng.bit() ? 1 : 0;
      continue;
    }
    ofdm::gray_demap(cfg.modulation, rhat_data[d] / t[d], bits);
  }
  return out;
}

namespace {

// Prediction-only ascending recursion on a pure convolution segment
// (h*h)_{0..L-1}; exact whenever the segment is autoconvolution-consistent.
cvec ascending_recursion(const cvec& seg) {
  const int l = int(seg.size());
  cvec h(l, 0.0);
  if (l == 0 || std::abs(seg[0]) == 0.0) return h;
  h[0] = std::sqrt(seg[0]);
  for (int k = 1; k < l; ++k) {
    cplx acc = 0.0;
    for (int m = 1; m < k; ++m) acc += h[m] * h[k - m];
    h[k] = (seg[k] - acc) / (2.0 * h[0]);
  }
  return h;
}

struct NoiseMoments {
  double eps_eff = 0.0;
  double sigma2_eff = 0.0;
};

// Rayleigh-moment model of the residual r_k = b_k^2 - z_k. The combined
// per-tone noise after the two-symbol front end is CN(0, 2 sigma2).
NoiseMoments residual_moments(const ProcessedMeasurements& meas,
                              const PilotSequence& pilots, double sigma2) {
  const int p = int(meas.values.size());
  const double s_r = std::sqrt(sigma2);  // Rayleigh scale of |n-hat|
  const double e1 = s_r * std::sqrt(kPi / 2.0);
  const double nu = 2.0 * sigma2;
  double sum_sq = 0.0, sum_var = 0.0;
  for (int k = 0; k < p; ++k) {
    const double mag = std::abs(pilots.values[k]);
    const double alpha = 1.0 / (std::sqrt(double(p)) * mag);
    const double b = meas.kind == ProcessedMeasurements::Kind::absolute
                         ? meas.values[k]
                         : std::sqrt(std::max(meas.values[k], 0.0));
    const double m = std::max(b * b - alpha * alpha * nu, 0.0);
    const double mean = 2.0 * alpha * std::sqrt(m) * e1 + alpha * alpha * nu;
    const double var = 4.0 * m * alpha * alpha * (2.0 - kPi / 2.0) * sigma2 +
                       4.0 * std::pow(alpha, 3) * std::sqrt(m) *
                           std::sqrt(kPi / 2.0) * std::pow(s_r, 3) +
                       4.0 * std::pow(alpha, 4) * std::pow(s_r, 4);
    sum_sq += var + mean * mean;
    sum_var += var;
  }
  return {std::sqrt(sum_sq), sum_var / p};
}

}  // namespace

double default_eps_eff(const ProcessedMeasurements& b,
                       const PilotSequence& pilots, double sigma2) {
  return residual_moments(b, pilots, sigma2).eps_eff;
}

double default_sigma2_eff(const ProcessedMeasurements& b,
                          const PilotSequence& pilots, double sigma2) {
  return residual_moments(b, pilots, sigma2).sigma2_eff;
}

EstimatorReport phaseless_estimate(const ProcessedMeasurements& meas,
                                   const OfdmConfig& cfg, Stage1 stage1,
                                   const EstimatorKnobs& knobs, double sigma2,
                                   const PilotSequence& pilots,
                                   const std::optional<SignReference>& ref) {
  const double sigma2_eff = knobs.sigma2_eff >= 0
                                ? knobs.sigma2_eff
                                : default_sigma2_eff(meas, pilots, sigma2);

  AutoConvolution a;
  if (stage1 == Stage1::ls) {
    const double tau = knobs.tau >= 0 ? knobs.tau : sigma2_eff;
    a = autoconv_ls(meas, cfg, tau);
  } else {
    const double eps = knobs.eps_eff >= 0
                           ? knobs.eps_eff
                           : default_eps_eff(meas, pilots, sigma2);
    a = autoconv_bpdn(meas, cfg, eps);
  }

  const VectorXd b2 = squared_values(meas);
  const MatrixXd design = stage1_design(cfg.p, cfg.l);
  auto model_residual = [&](const cvec& h) {
    const cvec c = centered_autoconv(h);
    VectorXd theta(4 * cfg.l + 1);
    theta[0] = c[0].real();
    for (int j = 1; j <= 2 * cfg.l; ++j) {
      theta[j] = c[j].real();
      theta[2 * cfg.l + j] = c[j].imag();
    }
    return (design * theta - b2).norm();
  };

  cvec seg = extract_h_segment(a);
  const double lambda = knobs.lambda >= 0
                            ? knobs.lambda
                            : universal_threshold(sigma2_eff, cfg.l);
  const cvec thr = threshold_autoconv(seg, lambda);

  DeautoconvOptions opts;
  opts.alpha = knobs.alpha;
  opts.omega = knobs.omega;
  opts.k_prun = knobs.k_prun;
  ChannelImpulseResponse h = deautoconvolve(thr, cfg, opts);

  EstimatorReport report;
  report.stage1_residual = model_residual(ascending_recursion(seg));

  if (ref.has_value()) {
    const SignDecision dec = resolve_sign(h, *ref);
    h = dec.h;
    report.sign_resolved = !dec.ambiguous;
  }
  report.residual = model_residual(h.taps);
  report.h_hat = std::move(h);
  return report;
}

}  // namespace phaseless::est
