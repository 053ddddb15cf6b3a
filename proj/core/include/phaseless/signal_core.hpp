#pragma once

#include <cstddef>

#include "phaseless/dft.hpp"
#include "phaseless/types.hpp"

namespace phaseless::signal {

// Channel impulse response h in C^L with an optional sparsity budget S <= L.
struct ChannelImpulseResponse {
  cvec taps;
  int sparsity_bound = 0;  // 0 means "no sparse prior declared"

  int length() const { return static_cast<int>(taps.size()); }
};

// (0, h, 0_K, conj(h) reversed) in 2L+1+K dimensions. Its DFT is real.
struct SymmetrizedSignal {
  cvec entries;
  int origin_length = 0;
  int pad = 0;
};

// Real embedding g = (Re h; Im h) of a length-L channel.
struct RealEmbedding {
  rvec g;

  int channel_length() const { return static_cast<int>(g.size() / 2); }
};

// Circular down-shift by k (k may be negative): out[i] = x[(i - k) mod N].
cvec circ_shift(const cvec& x, long long k);

// Time reversal out[i] = x[N-1-i].
cvec reverse(const cvec& x);

cvec conj_vec(const cvec& x);

// (conj x) reversed — the receive-side flip used throughout the burst path.
cvec conj_reverse(const cvec& x);

// Circular convolution of equal-length vectors.
cvec circ_conv(const cvec& x, const cvec& y);

// Linear convolution, length |x|+|y|-1.
cvec lin_conv(const cvec& x, const cvec& y);

// Circular autocorrelation r_k = sum_l x_l conj(x_{l-k}).
cvec circ_autocorr(const cvec& x);

SymmetrizedSignal symmetrize(const ChannelImpulseResponse& h, int pad);

RealEmbedding real_embed(const ChannelImpulseResponse& h);

// Applies the linear map Lambda: R^{2L} -> C^{2L+1+K}; equals symmetrize()
// of the channel the embedding came from, exactly.
SymmetrizedSignal apply_lambda(const RealEmbedding& g, int pad);

// True iff ||x - S (conj x)_-||_inf <= tol.
bool is_conj_symmetric(const cvec& x, double tol);

double norm2(const cvec& x);
double norm2(const rvec& x);
double norm_inf(const cvec& x);

// Throws ConfigError when a vector contains NaN/Inf.
void ensure_finite(const cvec& x, const char* what);

}  // namespace phaseless::signal
