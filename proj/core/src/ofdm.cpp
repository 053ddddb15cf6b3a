#include "phaseless/ofdm.hpp"

#include <algorithm>
#include <cmath>

namespace phaseless::ofdm {

using signal::circ_shift;
using signal::conj_reverse;
using signal::dft;
using signal::idft;
using signal::lin_conv;

int bits_per_symbol(Modulation m) { return m == Modulation::qpsk ? 2 : 4; }

void OfdmConfig::validate(bool phaseless_path) const {
  if (n <= 0 || (n & (n - 1)) != 0) throw ConfigError("OfdmConfig: N must be a power of two");
  if (p <= 0 || n % p != 0) throw ConfigError("OfdmConfig: P must divide N");
  if (p % 2 != 0) throw ConfigError("OfdmConfig: P must be even");
  if (l <= 0) throw ConfigError("OfdmConfig: L must be positive");
  if (s <= 0 || s > l) throw ConfigError("OfdmConfig: need 0 < S <= L");
  if (pilot_power <= 0) throw ConfigError("OfdmConfig: pilot power must be positive");
  if (phaseless_path) {
    if (p < 4 * l + 2) throw ConfigError("OfdmConfig: phaseless path needs P >= 4L+2");
  } else {
    if (p < 2 * l) throw ConfigError("OfdmConfig: classical path needs P >= 2L");
  }
  if (n < 2 * l + 2) throw ConfigError("OfdmConfig: N too small for CP length L");
}

rvec PilotSequence::magnitudes() const {
  rvec out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](cplx v) { return std::abs(v); });
  return out;
}

PilotSequence PilotSequence::unit_random_phases(int p, double power, Rng& rng) {
  PilotSequence seq;
  seq.values.resize(p);
  const double mag = std::sqrt(power);
  for (auto& v : seq.values) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    v = mag * cplx{std::cos(phase), std::sin(phase)};
  }
  return seq;
}

std::vector<int> build_pilot_grid(const OfdmConfig& cfg) {
  if (cfg.p <= 0 || cfg.n % cfg.p != 0) throw ConfigError("build_pilot_grid: P must divide N");
  std::vector<int> grid(cfg.p);
  for (int k = 0; k < cfg.p; ++k) grid[k] = k * cfg.d();
  return grid;
}

cplx gray_map(Modulation m, const std::uint8_t* bits) {
  if (m == Modulation::qpsk) {
    const double inv = 1.0 / std::sqrt(2.0);
    return {inv * (1.0 - 2.0 * bits[0]), inv * (1.0 - 2.0 * bits[1])};
  }
  // 16QAM, Gray per axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
  auto axis = [](std::uint8_t b0, std::uint8_t b1) {
    const double lvl = b0 ? (b1 ? 1.0 : 3.0) : (b1 ? -1.0 : -3.0);
    return lvl;
  };
  const double inv = 1.0 / std::sqrt(10.0);
  return {inv * axis(bits[0], bits[1]), inv * axis(bits[2], bits[3])};
}

void gray_demap(Modulation m, cplx symbol, std::uint8_t* bits) {
  if (m == Modulation::qpsk) {
    bits[0] = symbol.real() < 0 ? 1 : 0;
    bits[1] = symbol.imag() < 0 ? 1 : 0;
    return;
  }
  auto axis = [](double v, std::uint8_t* out) {
    const double x = v * std::sqrt(10.0);
    if (x < -2.0) { out[0] = 0; out[1] = 0; }
    else if (x < 0.0) { out[0] = 0; out[1] = 1; }
    else if (x < 2.0) { out[0] = 1; out[1] = 1; }
    else { out[0] = 1; out[1] = 0; }
  };
  axis(symbol.real(), bits);
  axis(symbol.imag(), bits + 2);
}

cvec modulate_frame(const OfdmConfig& cfg, const PilotSequence& pilots,
                    const std::vector<std::uint8_t>& payload) {
  if (static_cast<int>(pilots.values.size()) != cfg.p)
    throw ConfigError("modulate_frame: pilot length != P");
  if (static_cast<int>(payload.size()) != cfg.payload_bits())
    throw ConfigError("modulate_frame: payload size mismatch");
  const int bps = bits_per_symbol(cfg.modulation);
  cvec frame(cfg.n, 0.0);
  const int d = cfg.d();
  std::size_t bit = 0;
  int pilot_idx = 0;
  for (int k = 0; k < cfg.n; ++k) {
    if (k % d == 0) {
      frame[k] = pilots.values[pilot_idx++];
    } else {
      frame[k] = gray_map(cfg.modulation, payload.data() + bit);
      bit += bps;
    }
  }
  return frame;
}

cvec time_symbol(const cvec& freq_frame) { return idft(freq_frame); }

PhaselessBurst build_phaseless_burst(const cvec& s1, const cvec& s2,
                                     const OfdmConfig& cfg) {
  if (static_cast<int>(s1.size()) != cfg.n || static_cast<int>(s2.size()) != cfg.n)
    throw ConfigError("build_phaseless_burst: symbol length != N");
  const int n = cfg.n, l = cfg.l;
  const cvec s2r = conj_reverse(s2);
  cvec burst;
  burst.reserve(2 * n + 2 * l + 1);
  burst.push_back(0.0);
  burst.insert(burst.end(), s1.end() - l, s1.end());    // CP1
  burst.insert(burst.end(), s1.begin(), s1.end());
  burst.insert(burst.end(), s2r.end() - l, s2r.end());  // CP2
  burst.insert(burst.end(), s2r.begin(), s2r.end());
  return {std::move(burst), n, l};
}

cvec apply_channel(const cvec& tx, const ChannelImpulseResponse& h,
                   double sigma2, Rng& rng) {
  if (sigma2 < 0) throw ConfigError("apply_channel: negative noise variance");
  cvec r = lin_conv(h.taps, tx);
  if (sigma2 > 0) {
    for (auto& v : r) v += rng.cgauss(sigma2);
  }
  return r;
}

std::pair<cvec, cvec> receiver_front_end(const cvec& r, const OfdmConfig& cfg) {
  const int n = cfg.n, l = cfg.l;
  if (static_cast<int>(r.size()) < 2 * n + 3 * l)
    throw ConfigError("receiver_front_end: received burst too short");
  cvec y1(r.begin() + (l + 1), r.begin() + (l + 1 + n));
  cvec y2(r.begin() + (2 * l + n + 1), r.begin() + (2 * l + n + 1 + n));
  return {std::move(y1), std::move(y2)};
}

std::pair<cvec, cvec> combined_spectra(const cvec& y1, const cvec& y2) {
  cvec g1 = dft(circ_shift(y1, 1));
  cvec g2 = dft(circ_shift(conj_reverse(y2), -1));
  return {std::move(g1), std::move(g2)};
}

cvec combine_and_sample(const cvec& y1, const cvec& y2, const OfdmConfig& cfg) {
  if (static_cast<int>(y1.size()) != cfg.n || static_cast<int>(y2.size()) != cfg.n)
    throw ConfigError("combine_and_sample: window length != N");
  auto [g1, g2] = combined_spectra(y1, y2);
  const int d = cfg.d();
  cvec yhat(cfg.p);
  for (int k = 0; k < cfg.p; ++k) yhat[k] = g1[k * d] + g2[k * d];
  return yhat;
}

ProcessedMeasurements processed_measurements(const cvec& yhat,
                                             const PilotSequence& pilots,
                                             ProcessedMeasurements::Kind kind) {
  if (yhat.size() != pilots.values.size())
    throw ConfigError("processed_measurements: length mismatch");
  const int p = static_cast<int>(yhat.size());
  ProcessedMeasurements out;
  out.kind = kind;
  out.values.resize(p);
  for (int k = 0; k < p; ++k) {
    const double mag = std::abs(pilots.values[k]);
    if (mag <= 0) throw ConfigError("processed_measurements: zero pilot magnitude");
    if (kind == ProcessedMeasurements::Kind::squared) {
      out.values[k] = std::norm(yhat[k]) / (p * mag * mag);
    } else {
      out.values[k] = std::abs(yhat[k]) / (std::sqrt(static_cast<double>(p)) * mag);
    }
  }
  return out;
}

ChannelImpulseResponse random_sparse_channel(int l, int s, Rng& rng) {
  if (s <= 0 || s > l) throw ConfigError("random_sparse_channel: need 0 < S <= L");
  ChannelImpulseResponse h;
  h.taps.assign(l, 0.0);
  h.sparsity_bound = s;
  // Tap 0 is always in the support; the rest drawn without replacement.
  std::vector<int> support{0};
  std::vector<int> pool;
  for (int i = 1; i < l; ++i) pool.push_back(i);
  for (int pick = 1; pick < s; ++pick) {
    const std::size_t j = rng.uniform_below(pool.size());
    support.push_back(pool[j]);
    pool.erase(pool.begin() + j);
  }
  double energy = 0.0;
  for (int idx : support) {
    h.taps[idx] = rng.cgauss(1.0);
    energy += std::norm(h.taps[idx]);
  }
  const double inv = 1.0 / std::sqrt(energy);
  for (auto& v : h.taps) v *= inv;
  return h;
}

}  // namespace phaseless::ofdm
