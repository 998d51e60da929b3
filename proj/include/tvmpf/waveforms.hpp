#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tvmpf/signal.hpp"

namespace tvmpf {

/// Linear chirp f_start -> f_stop over one period, repeated.
struct Lfm {
  double f_start = 2.5e9;
  double f_stop = 3.7e9;
  double period = 4e-6;
};

enum class NlfmProfile {
  kQuadratic,   // f = f_start + B (t/T)^2
  kSinusoidal,  // f = f_center + (B/2) sin(pi (2t/T - 1))
};

struct Nlfm {
  double f_start = 2.5e9;
  double f_stop = 3.7e9;
  double period = 4e-6;
  NlfmProfile profile = NlfmProfile::kQuadratic;
};

/// Simultaneous up- and down-chirp of equal amplitude.
struct Dlfm {
  Lfm up{2.5e9, 3.7e9, 4e-6};
  Lfm down{3.7e9, 2.5e9, 4e-6};
};

enum class FhPhaseMode {
  kContinuousPerTone,  // each tone keeps its own running phase across dwells
  kReset,              // phase restarts at zero on every hop
};

struct Fh {
  std::vector<double> freqs{2.5e9, 2.8e9};
  double dwell = 10e-9;
  FhPhaseMode phase_mode = FhPhaseMode::kContinuousPerTone;
};

/// Binary phase code on a carrier. An empty `code` means "draw n_bits from a
/// Bernoulli(0.5) PRNG seeded by the synthesis seed".
struct PhaseCoded {
  double carrier = 2.5e9;
  std::size_t n_bits = 400;
  double period = 4e-6;
  std::vector<std::uint8_t> code;
};

using WaveformVariant = std::variant<Lfm, Nlfm, Dlfm, Fh, PhaseCoded>;

struct WaveformSpec {
  WaveformVariant shape = Lfm{};
  double amplitude = 1.0;

  /// Repetition period of the whole pattern (dwell * tones for FH).
  double period() const;
  /// Smallest and largest instantaneous frequency the waveform can produce.
  std::pair<double, double> frequency_range() const;
  /// Number of simultaneous frequency components (2 for DLFM).
  std::size_t component_count() const;
  /// Short family name: lfm, nlfm, dlfm, fh, bpsk.
  std::string kind() const;

  /// Parameter invariants that do not depend on the sampling grid.
  void validate() const;
};

inline constexpr std::uint64_t kDefaultCodeSeed = 400;

/// Sample-domain synthesis: returns A cos(phi(t)) (a sum of two for DLFM) and
/// the analytic instantaneous-frequency track. Sampling starts at t = 0.
std::pair<SampledSignal, FrequencyTrack> synthesize(const WaveformSpec& spec, double sample_rate,
                                                    double duration, std::uint64_t seed);

/// Bit sequence a PhaseCoded spec would use for the given seed.
std::vector<std::uint8_t> phase_code(const PhaseCoded& pc, std::uint64_t seed);

/// Control-signal spec whose every frequency f is replaced by the control
/// frequency that places the filter passband on f:
///   sideband_sign = -1: f_ctrl = bfs + f
///   sideband_sign = +1: f_ctrl = f - bfs
WaveformSpec derive_control(const WaveformSpec& spec, double bfs, int sideband_sign);

/// RMS deviation (Hz) between a single-component track and the frequency
/// estimated from the analytic-signal phase, with transitions excluded.
double instantaneous_frequency_error(const SampledSignal& signal, const FrequencyTrack& track);

/// Samples excluded on each side of a transition (and at the record ends) by
/// instantaneous_frequency_error.
inline constexpr std::size_t kTransitionGuard = 256;

}  // namespace tvmpf
