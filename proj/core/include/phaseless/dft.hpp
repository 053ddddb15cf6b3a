#pragma once

#include "phaseless/types.hpp"

namespace phaseless::signal {

// Unitary DFT, (F_N)_{lk} = w^{lk}/sqrt(N) with w = exp(-i 2 pi / N).
// Power-of-two lengths take the radix-2 path; other lengths fall back to
// direct summation (only small odd sizes ever reach it here).
cvec dft(const cvec& x);
cvec idft(const cvec& x);

}  // namespace phaseless::signal
