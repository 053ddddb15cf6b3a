#include "phaseless/signal_core.hpp"

#include <algorithm>
#include <cmath>

namespace phaseless::signal {

cvec circ_shift(const cvec& x, long long k) {
  const long long n = static_cast<long long>(x.size());
  if (n == 0) throw ConfigError("circ_shift: empty input");
  cvec out(x.size());
  const long long shift = ((k % n) + n) % n;
  for (long long i = 0; i < n; ++i) out[(i + shift) % n] = x[i];
  return out;
}

cvec reverse(const cvec& x) { return cvec(x.rbegin(), x.rend()); }

cvec conj_vec(const cvec& x) {
  cvec out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](cplx v) { return std::conj(v); });
  return out;
}

cvec conj_reverse(const cvec& x) {
  cvec out(x.size());
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = std::conj(x[n - 1 - i]);
  return out;
}

cvec circ_conv(const cvec& x, const cvec& y) {
  if (x.size() != y.size()) throw ConfigError("circ_conv: length mismatch");
  const std::size_t n = x.size();
  if (n == 0) throw ConfigError("circ_conv: empty input");
  if ((n & (n - 1)) == 0) {
    cvec fx = dft(x), fy = dft(y);
    for (std::size_t k = 0; k < n; ++k) fx[k] *= fy[k];
    cvec out = idft(fx);
    const double s = std::sqrt(static_cast<double>(n));
    for (auto& v : out) v *= s;
    return out;
  }
  cvec out(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    if (x[l] == cplx(0.0)) continue;
    for (std::size_t j = 0; j < n; ++j) out[(l + j) % n] += x[l] * y[j];
  }
  return out;
}

cvec lin_conv(const cvec& x, const cvec& y) {
  if (x.empty() || y.empty()) throw ConfigError("lin_conv: empty input");
  cvec out(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == cplx(0.0)) continue;
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  }
  return out;
}

cvec circ_autocorr(const cvec& x) {
  const std::size_t n = x.size();
  cvec out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) acc += x[l] * std::conj(x[(l + n - k) % n]);
    out[k] = acc;
  }
  return out;
}

SymmetrizedSignal symmetrize(const ChannelImpulseResponse& h, int pad) {
  if (pad < 0) throw ConfigError("symmetrize: negative pad");
  if (h.taps.empty()) throw ConfigError("symmetrize: empty channel");
  ensure_finite(h.taps, "symmetrize");
  const int L = h.length();
  cvec out;
  out.reserve(2 * L + 1 + pad);
  out.push_back(0.0);
  out.insert(out.end(), h.taps.begin(), h.taps.end());
  out.insert(out.end(), pad, cplx(0.0));
  for (int j = L - 1; j >= 0; --j) out.push_back(std::conj(h.taps[j]));
  return {std::move(out), L, pad};
}

RealEmbedding real_embed(const ChannelImpulseResponse& h) {
  const int L = h.length();
  rvec g(2 * L);
  for (int i = 0; i < L; ++i) {
    g[i] = h.taps[i].real();
    g[L + i] = h.taps[i].imag();
  }
  return {std::move(g)};
}

SymmetrizedSignal apply_lambda(const RealEmbedding& emb, int pad) {
  const int L = emb.channel_length();
  ChannelImpulseResponse h;
  h.taps.resize(L);
  for (int i = 0; i < L; ++i) h.taps[i] = {emb.g[i], emb.g[L + i]};
  return symmetrize(h, pad);
}

bool is_conj_symmetric(const cvec& x, double tol) {
  if (tol < 0) throw ConfigError("is_conj_symmetric: negative tolerance");
  const std::size_t n = x.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // S (conj x)_- at index k is conj(x[(n - k) mod n]).
    const cplx mirrored = std::conj(x[(n - k) % n]);
    worst = std::max(worst, std::abs(x[k] - mirrored));
  }
  return worst <= tol;
}

double norm2(const cvec& x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return std::sqrt(acc);
}

double norm2(const rvec& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

double norm_inf(const cvec& x) {
  double worst = 0.0;
  for (const auto& v : x) worst = std::max(worst, std::abs(v));
  return worst;
}

void ensure_finite(const cvec& x, const char* what) {
  for (const auto& v : x) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ConfigError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace phaseless::signal
