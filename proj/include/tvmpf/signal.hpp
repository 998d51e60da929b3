#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvmpf {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Raised for every contract violation in the library (bad parameters,
/// Nyquist violations, mismatched records, malformed files).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniformly sampled real waveform.
struct SampledSignal {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz
  double t0 = 0.0;           // s

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }

  /// Throws unless the rate is positive and every sample is finite.
  void validate() const;
};

/// Per-sample ground-truth instantaneous frequency, one sequence per
/// simultaneous component. `transitions` lists sample indices where the
/// waveform changes discontinuously (hops, bit boundaries, chirp wraps).
struct FrequencyTrack {
  std::vector<std::vector<double>> components;
  std::vector<std::size_t> transitions;

  std::size_t component_count() const { return components.size(); }
};

/// Closed frequency interval [low, high] in Hz.
struct Band {
  double low = 0.0;
  double high = 0.0;

  double width() const { return high - low; }
  bool contains(double f) const { return f >= low && f <= high; }

  /// Requires 0 < low < high < sample_rate / 2.
  void validate(double sample_rate) const;
};

/// Complex baseband envelope of the optical field, relative to the laser line.
struct OpticalEnvelope {
  std::vector<cplx> samples;
  double sample_rate = 0.0;
  double carrier_offset = 0.0;

  std::size_t size() const { return samples.size(); }
};

void require_same_grid(const SampledSignal& a, const SampledSignal& b, const char* what);

/// Signed frequency of FFT bin k in an n-point transform at rate fs.
inline double bin_frequency(std::size_t k, std::size_t n, double fs) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  return (2 * k < n ? kk : kk - nn) * fs / nn;
}

inline double db10(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace tvmpf
