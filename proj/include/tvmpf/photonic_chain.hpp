#pragma once

#include <optional>

#include "tvmpf/signal.hpp"

namespace tvmpf {

/// Null-biased Mach-Zehnder modulator.
struct MzmParams {
  double mod_index = 0.5;  // rad at unit (peak-normalized) drive

  void validate() const;
};

/// Optical band-pass filter on signed offsets from the laser line.
struct ObpfSpec {
  double low = -17e9;
  double high = -9e9;
  double edge_width = 50e6;

  void validate(double sample_rate) const;
};

struct PmParams {
  double mod_index = 0.1;  // rad per unit drive amplitude

  void validate() const;
};

/// Brillouin gain line. `intrinsic_linewidth` is derived from the other three
/// fields by calibrate_linewidth(); leave it empty to calibrate on demand.
struct SbsParams {
  double bfs = 10.8e9;
  double target_bw3db = 22.5e6;
  double peak_gain_db = 15.0;
  std::optional<double> intrinsic_linewidth;

  void validate() const;
  /// Peak power gain in nepers: ln(10^(peak_gain_db/10)).
  double peak_gain_nepers() const;
};

struct BpfSpec {
  Band band{2.4e9, 4.0e9};
  double edge_width = 50e6;

  void validate(double sample_rate) const;
};

/// E(t) = sin(m c(t)) with c the drive normalized to unit peak.
OpticalEnvelope mzm_csdsb(const SampledSignal& drive, const MzmParams& params);

/// Raised-cosine optical band selection in the frequency domain.
OpticalEnvelope obpf_select(const OpticalEnvelope& field, const ObpfSpec& spec);

/// E_out(t) = E_in(t) exp(j m s(t)).
OpticalEnvelope phase_modulate(const OpticalEnvelope& field, const SampledSignal& drive,
                               const PmParams& params);

/// Intrinsic Brillouin linewidth for which the optical power gain
/// |exp[(g0/2)/(1 + 2j d/dv)]|^2 falls to half its peak at d = +-target_bw3db/2.
double calibrate_linewidth(const SbsParams& params);

/// Returns params with intrinsic_linewidth filled in.
SbsParams resolve_sbs(SbsParams params);

/// Complex Lorentzian gain H(f) = exp[(g0/2) / (1 + 2j (f - f_B)/dv)],
/// f_B = pump_offset - bfs.
cplx sbs_transfer(double f, const SbsParams& params, double pump_offset);

/// Applies sbs_transfer to the whole record in the frequency domain.
OpticalEnvelope sbs_gain(const OpticalEnvelope& field, const SbsParams& params,
                         double pump_offset = 0.0);

/// Square-law detection |E|^2 with the mean removed.
SampledSignal photodetect(const OpticalEnvelope& field);

/// Zero-phase raised-cosine band-pass on |f|.
SampledSignal electrical_bpf(const SampledSignal& signal, const BpfSpec& spec);

/// Passband center for a control tone at f_ctrl:
/// sideband_sign = -1 -> |bfs - f_ctrl|, +1 -> bfs + f_ctrl.
double mpf_center_frequency(double f_ctrl, double bfs, int sideband_sign);

}  // namespace tvmpf
