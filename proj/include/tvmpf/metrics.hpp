#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tvmpf/signal.hpp"

namespace tvmpf {

struct RunArtifacts;

/// Lag/gain-aligned normalized waveform error.
///
/// The candidate is circularly shifted by the integer lag in
/// [-max_lag, max_lag] that maximizes |cross-correlation| (ties go to the
/// smallest |lag|), both records are trimmed to the shorter length, and the
/// least-squares gain a = <c, r> / <c, c> is applied. The result is
/// sum (a c - r)^2 / sum r^2.
///
/// Lengths may differ by at most 1 %. The default search window is 1 % of
/// the longer record.
double mse(const SampledSignal& candidate, const SampledSignal& reference,
           std::optional<std::size_t> max_lag = std::nullopt);

/// Lag chosen by mse(); exposed for diagnostics and tests.
long best_lag(const SampledSignal& candidate, const SampledSignal& reference,
              std::optional<std::size_t> max_lag = std::nullopt);

struct Spectrogram {
  std::vector<std::vector<double>> power_db;  // [frame][bin]
  std::vector<double> frame_times;            // s, window centers
  std::vector<double> bin_freqs;              // Hz
  std::vector<std::size_t> frame_starts;      // first sample of each frame
  std::size_t window_len = 0;
  std::size_t hop = 0;
  double sample_rate = 0.0;

  std::size_t frames() const { return frame_times.size(); }
  double bin_width() const;
};

inline constexpr std::size_t kDefaultWindowLen = 512;
inline constexpr std::size_t kDefaultHop = 256;
/// Floor applied to empty bins so every cell is finite.
inline constexpr double kPowerFloorDb = -300.0;

/// Hann-windowed short-time power spectra (one-sided, |X_k|^2 in dB). Frames
/// start every `hop` samples; a final frame is aligned to the record end when
/// the hops do not land on it exactly. `display` restricts the stored bins.
Spectrogram spectrogram(const SampledSignal& signal, std::size_t window_len = kDefaultWindowLen,
                        std::size_t hop = kDefaultHop,
                        std::optional<Band> display = std::nullopt);

/// Ridge frequency of one frame by log-parabolic interpolation around the
/// strongest bin within `search` (all bins when empty).
double ridge_frequency(const Spectrogram& sg, std::size_t frame,
                       std::optional<Band> search = std::nullopt);

struct BpskRecovery {
  std::vector<double> phases;       // rad, relative to the first bit, in (-pi, pi]
  std::vector<std::uint8_t> bits;   // 1 where the phase is nearer pi
};

/// Coherent demodulation at `carrier`; the complex baseband is averaged over
/// the central 60 % of each bit.
BpskRecovery recover_bpsk_phase(const SampledSignal& signal, double carrier, double bit_duration);

/// Decisions compared with the generating code, with the global pi
/// ambiguity fixed by the first bit: counts k where bits[k] != code[k] ^ code[0].
std::size_t count_bit_errors(const std::vector<std::uint8_t>& bits,
                             const std::vector<std::uint8_t>& code);

/// Returned by mse_improvement when mse_after is zero.
inline constexpr double kPerfectImprovement = std::numeric_limits<double>::infinity();

/// 10 log10(mse_before / mse_after).
double mse_improvement(const RunArtifacts& artifacts);
double mse_improvement(double mse_before, double mse_after);

}  // namespace tvmpf
