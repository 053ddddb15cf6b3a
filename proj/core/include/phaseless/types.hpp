#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaseless {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

// Raised for invalid configuration/arguments (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an estimator cannot produce a usable result (CLI exit code 3).
struct EstimatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on file I/O failures; message carries the path (CLI exit code 4).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phaseless
