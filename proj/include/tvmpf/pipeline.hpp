#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvmpf/noise_cal.hpp"
#include "tvmpf/photonic_chain.hpp"
#include "tvmpf/waveforms.hpp"

namespace tvmpf {

/// Full configuration of the simulated filter.
struct ChainConfig {
  double sample_rate = 64e9;
  double duration = 4e-6;
  int sideband_sign = -1;
  MzmParams mzm;
  /// Empty: derived per run from the control band (see auto_obpf).
  std::optional<ObpfSpec> obpf;
  PmParams pm;
  SbsParams sbs;
  double pump_offset = 0.0;
  BpfSpec bpf;
  Band noise_band{2.4e9, 4.0e9};
  std::uint64_t seed = 1;
  /// Seeds the phase code; kept apart from `seed` so the reference waveform
  /// does not depend on the noise seed.
  std::uint64_t waveform_seed = kDefaultCodeSeed;
  /// Control delay relative to the signal, s (rounded to whole samples).
  double control_skew = 0.0;

  void validate() const;
};

inline constexpr double kObpfMargin = 1e9;
inline constexpr double kDefaultEdgeWidth = 50e6;

/// OBPF covering the control band +- kObpfMargin on the side chosen by
/// sideband_sign (negative offsets for -1, positive for +1).
ObpfSpec auto_obpf(const WaveformSpec& control, int sideband_sign, double sample_rate);

/// cfg.obpf if set, otherwise auto_obpf; checked for consistency with the sign.
ObpfSpec resolve_obpf(const ChainConfig& cfg, const WaveformSpec& control);

struct RunMetadata {
  std::string waveform;
  int sideband_sign = -1;
  std::uint64_t seed = 0;
  std::optional<double> snr_db;
  double measured_snr_db = kNoNoiseSnr;
};

struct RunArtifacts {
  SampledSignal noisy_input;  // electrical_bpf(s + n), the "before" waveform
  SampledSignal reference;    // noise-free signal through the chain
  SampledSignal filtered;     // noisy signal through the chain
  double mse_before = 0.0;
  double mse_after = 0.0;
  std::optional<double> snr_target;
  RunMetadata metadata;
};

struct MsePair {
  double mse_before = 0.0;
  double mse_after = 0.0;
};

/// One waveform on one chain. The noise-independent parts (signal, control,
/// optical carrier after the OBPF, both references) are computed once, so
/// repeated runs only pay for the noisy path.
class Experiment {
 public:
  Experiment(WaveformSpec spec, ChainConfig cfg);

  RunArtifacts run(std::optional<double> snr_db, std::uint64_t seed) const;
  MsePair run_mse(std::optional<double> snr_db, std::uint64_t seed) const;

  /// PM -> SBS -> PD -> BPF on the cached optical carrier.
  SampledSignal through_chain(const SampledSignal& drive) const;
  /// Signal plus calibrated noise (the clean signal when snr_db is empty).
  SampledSignal noisy_drive(std::optional<double> snr_db, std::uint64_t seed) const;

  const WaveformSpec& spec() const { return spec_; }
  const WaveformSpec& control_spec() const { return control_spec_; }
  const ChainConfig& config() const { return cfg_; }
  const SampledSignal& signal() const { return signal_; }
  const FrequencyTrack& track() const { return track_; }
  const SampledSignal& control() const { return control_; }
  const OpticalEnvelope& optical_carrier() const { return carrier_; }
  const SampledSignal& reference() const { return reference_; }
  const SampledSignal& reference_direct() const { return reference_direct_; }
  const ObpfSpec& obpf() const { return obpf_; }

 private:
  WaveformSpec spec_;
  WaveformSpec control_spec_;
  ChainConfig cfg_;
  ObpfSpec obpf_;
  SampledSignal signal_;
  FrequencyTrack track_;
  SampledSignal control_;
  OpticalEnvelope carrier_;
  SampledSignal reference_;
  SampledSignal reference_direct_;
};

/// Synthesize, add calibrated noise (none when snr_db is empty), run the chain
/// and score both paths against their noise-free references.
RunArtifacts run_experiment(const WaveformSpec& spec, std::optional<double> snr_db,
                            const ChainConfig& cfg);

/// Idealized tracking filter: de-chirp the analytic signal along the track,
/// apply a one-sided Lorentzian of 3-dB width sbs.target_bw3db, re-chirp and
/// scale by the peak field gain.
SampledSignal behavioral_filter(const SampledSignal& signal, const FrequencyTrack& track,
                                const SbsParams& sbs);

struct ResponsePoint {
  double freq = 0.0;         // Hz, snapped to the record's frequency grid
  double response_db = 0.0;  // output/input power at the probe frequency
};

/// Stepped-tone response with the control held at a single tone f_ctrl. Each
/// probe is one chain run (MZM -> OBPF -> PM -> SBS -> PD); the PD output is
/// read directly, without the electrical BPF.
std::vector<ResponsePoint> measure_response(double f_ctrl, const ChainConfig& cfg,
                                            std::span<const double> probe_freqs);

struct ScanGrid {
  double coarse_low = 0.5e9;
  double coarse_high = 5.0e9;
  double coarse_step = 20e6;
  double fine_half_span = 30e6;
  double fine_step = 0.5e6;
};

struct PassbandMeasurement {
  double f_ctrl = 0.0;
  double expected_center = 0.0;
  double peak_freq = 0.0;
  double peak_db = 0.0;
  double bw3db = 0.0;  // NaN when a -3 dB crossing falls outside the fine span
  std::vector<ResponsePoint> curve;
};

/// Coarse scan to locate the passband, then a fine scan around the coarse
/// maximum. The peak is log-parabola interpolated; the -3 dB width comes from
/// linear interpolation of the two crossings.
PassbandMeasurement scan_passband(double f_ctrl, const ChainConfig& cfg, const ScanGrid& grid = {});

struct SweepRow {
  double snr_db = 0.0;
  double mse_before = 0.0;  // mean over seeds
  double mse_after = 0.0;
  std::size_t seeds = 0;
};

/// Mean MSEs per SNR over seeds cfg.seed, cfg.seed + 1, ...; rows sorted by
/// SNR. Jobs run on `threads` workers (0 = hardware concurrency); results do
/// not depend on the worker count.
std::vector<SweepRow> run_sweep(const WaveformSpec& spec, std::span<const double> snr_list,
                                const ChainConfig& cfg, std::size_t seeds_per_point,
                                unsigned threads = 0);

/// Runs fn(i) for i in [0, count) on a small worker pool.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn);

}  // namespace tvmpf

#include "tvmpf/detail/parallel.hpp"
