#pragma once

#include <span>
#include <vector>

#include "tvmpf/signal.hpp"

namespace tvmpf::dsp {

// Thin FFTW wrappers. Plans are cached per length and direction; execution is
// thread-safe and deterministic for a given input.

/// Unnormalized forward DFT.
std::vector<cplx> fft(std::span<const cplx> x);
std::vector<cplx> fft(std::span<const double> x);

/// Inverse DFT normalized by 1/n, so ifft(fft(x)) == x up to rounding.
std::vector<cplx> ifft(std::span<const cplx> x);

/// Real part of ifft.
std::vector<double> ifft_real(std::span<const cplx> x);

/// Analytic signal x + j*H{x}: positive bins doubled, negative bins zeroed.
std::vector<cplx> analytic_signal(std::span<const double> x);

/// Raised-cosine transition: 1 inside [lo, hi], cosine roll-off to 0 over
/// `edge` Hz beyond each band edge, 0 elsewhere.
double raised_cosine_mask(double f, double lo, double hi, double edge);

}  // namespace tvmpf::dsp
