#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phaseless/rng.hpp"
#include "phaseless/signal_core.hpp"
#include "phaseless/types.hpp"

namespace phaseless::ofdm {

using signal::ChannelImpulseResponse;

enum class Modulation { qpsk, qam16 };

int bits_per_symbol(Modulation m);

// System parameters. N subcarriers, P pilots spaced D = N/P apart, channel
// length bound L (also the CP length), sparsity budget S.
struct OfdmConfig {
  int n = 2048;
  int p = 256;
  int l = 20;
  int s = 3;
  Modulation modulation = Modulation::qpsk;
  double pilot_power = 1.0;

  int d() const { return n / p; }
  int data_tones() const { return n - p; }
  int payload_bits() const { return data_tones() * bits_per_symbol(modulation); }

  // The classical path needs P >= 2L; the phaseless path needs P >= 4L+2.
  void validate(bool phaseless_path) const;
};

// Pilot values u-hat on the P pilot tones. The receiver is entitled to the
// magnitudes only (phaseless path) or the full values (classical path).
struct PilotSequence {
  cvec values;

  rvec magnitudes() const;
  static PilotSequence unit_random_phases(int p, double power, Rng& rng);
};

// Time-domain burst of Eq-style layout (0, CP1, s1, CP2, (conj s2) reversed),
// length 2N + 2L + 1 before the channel.
struct PhaselessBurst {
  cvec samples;
  int n = 0;
  int l = 0;
};

struct ProcessedMeasurements {
  enum class Kind { squared, absolute };
  rvec values;  // z (squared) or b (absolute), length P
  Kind kind = Kind::squared;
  double noise_variance = 0.0;  // per-sample time-domain sigma^2, bookkeeping
};

std::vector<int> build_pilot_grid(const OfdmConfig& cfg);

// Frequency-domain frame: pilots on the grid, Gray-mapped payload elsewhere.
// payload bits must have exactly cfg.payload_bits() entries.
cvec modulate_frame(const OfdmConfig& cfg, const PilotSequence& pilots,
                    const std::vector<std::uint8_t>& payload);

cvec time_symbol(const cvec& freq_frame);

// Gray maps: QPSK bits (b0,b1) -> ((1-2 b0) + i (1-2 b1))/sqrt(2);
// 16QAM per-axis 2-bit Gray {00,01,11,10} -> {-3,-1,+1,+3}/sqrt(10).
cplx gray_map(Modulation m, const std::uint8_t* bits);
void gray_demap(Modulation m, cplx symbol, std::uint8_t* bits);

PhaselessBurst build_phaseless_burst(const cvec& s1, const cvec& s2,
                                     const OfdmConfig& cfg);

// Linear convolution with the channel plus i.i.d. CSCG noise of per-sample
// variance sigma2; output length |tx| + L - 1.
cvec apply_channel(const cvec& tx, const ChannelImpulseResponse& h,
                   double sigma2, Rng& rng);

// Extracts the two clean N-sample windows of the burst.
std::pair<cvec, cvec> receiver_front_end(const cvec& r, const OfdmConfig& cfg);

// Full-band combined spectra (F S y1, F S^{-1} (conj y2)_-). The pilot-tone
// samples of their sum feed the phaseless estimators; the data tones feed the
// demapper (symbol 2 sees the conjugated transfer).
std::pair<cvec, cvec> combined_spectra(const cvec& y1, const cvec& y2);

cvec combine_and_sample(const cvec& y1, const cvec& y2, const OfdmConfig& cfg);

ProcessedMeasurements processed_measurements(const cvec& yhat,
                                             const PilotSequence& pilots,
                                             ProcessedMeasurements::Kind kind);

// Sparse ensemble: support of size S with tap 0 always included, values
// i.i.d. complex Gaussian, normalized to ||h|| = 1.
ChannelImpulseResponse random_sparse_channel(int l, int s, Rng& rng);

}  // namespace phaseless::ofdm
