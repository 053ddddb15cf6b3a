#include "phaseless/dft.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace phaseless::signal {
namespace {

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

// Forward twiddles w^j = exp(-i 2 pi j / n), j < n. Cached per length.
const cvec& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, cvec> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  cvec w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    w[j] = {std::cos(a), std::sin(a)};
  }
  return cache.emplace(n, std::move(w)).first->second;
}

void fft_pow2(cvec& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const cvec& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx tw = w[j * stride];
        if (inverse) tw = std::conj(tw);
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * tw;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

cvec dft_naive(const cvec& x, bool inverse) {
  const std::size_t n = x.size();
  const cvec& w = twiddles(n);
  cvec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      cplx tw = w[(k * l) % n];
      if (inverse) tw = std::conj(tw);
      acc += x[l] * tw;
    }
    out[k] = acc;
  }
  return out;
}

cvec transform(const cvec& x, bool inverse) {
  const std::size_t n = x.size();
  if (n == 0) throw ConfigError("dft: empty input");
  cvec out;
  if (is_pow2(n)) {
    out = x;
    fft_pow2(out, inverse);
  } else {
    out = dft_naive(x, inverse);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace

cvec dft(const cvec& x) { return transform(x, false); }
cvec idft(const cvec& x) { return transform(x, true); }

}  // namespace phaseless::signal
