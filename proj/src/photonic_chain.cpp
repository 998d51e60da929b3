#include "tvmpf/photonic_chain.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "tvmpf/fft.hpp"

namespace tvmpf {

void MzmParams::validate() const {
  if (!(mod_index > 0.0 && mod_index < kPi)) throw Error("mzm.mod_index must lie in (0, pi)");
}

void ObpfSpec::validate(double sample_rate) const {
  const double nyq = sample_rate / 2.0;
  if (!(low >= -nyq && low < high && high <= nyq)) {
    std::ostringstream os;
    os << "obpf band [" << low << ", " << high << "] Hz must satisfy -" << nyq
       << " <= low < high <= " << nyq;
    throw Error(os.str());
  }
  if (!(edge_width >= 0.0)) throw Error("obpf.edge_width must be >= 0");
}

void PmParams::validate() const {
  if (!(mod_index > 0.0)) throw Error("pm.mod_index must be > 0");
}

void SbsParams::validate() const {
  if (!(bfs > 0.0)) throw Error("sbs.bfs must be > 0");
  if (!(target_bw3db > 0.0)) throw Error("sbs.target_bw3db must be > 0");
  if (!(peak_gain_db > 0.0)) throw Error("sbs.peak_gain_db must be > 0");
  if (intrinsic_linewidth && !(*intrinsic_linewidth > 0.0)) {
    throw Error("sbs.intrinsic_linewidth must be > 0");
  }
}

double SbsParams::peak_gain_nepers() const { return peak_gain_db * std::log(10.0) / 10.0; }

void BpfSpec::validate(double sample_rate) const {
  band.validate(sample_rate);
  if (!(edge_width >= 0.0)) throw Error("bpf.edge_width must be >= 0");
}

OpticalEnvelope mzm_csdsb(const SampledSignal& drive, const MzmParams& params) {
  params.validate();
  double peak = 0.0;
  for (double v : drive.samples) peak = std::max(peak, std::abs(v));
  OpticalEnvelope out;
  out.sample_rate = drive.sample_rate;
  out.samples.assign(drive.size(), cplx(0.0, 0.0));
  if (peak == 0.0) return out;
  const double m = params.mod_index / peak;
  for (std::size_t i = 0; i < drive.size(); ++i) out.samples[i] = std::sin(m * drive.samples[i]);
  return out;
}

OpticalEnvelope obpf_select(const OpticalEnvelope& field, const ObpfSpec& spec) {
  spec.validate(field.sample_rate);
  auto s = dsp::fft(field.samples);
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double f = bin_frequency(k, n, field.sample_rate) + field.carrier_offset;
    s[k] *= dsp::raised_cosine_mask(f, spec.low, spec.high, spec.edge_width);
  }
  OpticalEnvelope out = field;
  out.samples = dsp::ifft(s);
  return out;
}

OpticalEnvelope phase_modulate(const OpticalEnvelope& field, const SampledSignal& drive,
                               const PmParams& params) {
  params.validate();
  if (field.size() != drive.size() || field.sample_rate != drive.sample_rate) {
    throw Error("phase_modulate: field/drive length or rate mismatch");
  }
  OpticalEnvelope out = field;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i] *= std::polar(1.0, params.mod_index * drive.samples[i]);
  }
  return out;
}

double calibrate_linewidth(const SbsParams& params) {
  if (!(params.target_bw3db > 0.0)) throw Error("calibrate_linewidth: target_bw3db must be > 0");
  if (!(params.peak_gain_db > 0.0)) throw Error("calibrate_linewidth: peak_gain_db must be > 0");
  const double g0 = params.peak_gain_nepers();
  const double half = std::log(2.0);
  // Power gain in nepers is g0 / (1 + x^2); the drop from peak at the band
  // edge (x = target / dv) must equal ln 2.
  auto excess_drop = [&](double dv) {
    const double x = params.target_bw3db / dv;
    return g0 * x * x / (1.0 + x * x) - half;
  };
  double lo = params.target_bw3db * 1e-6;
  double hi = params.target_bw3db * 1e6;
  const double f_lo = excess_drop(lo);
  const double f_hi = excess_drop(hi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    std::ostringstream os;
    os << "calibrate_linewidth: no bracket; a peak gain of " << params.peak_gain_db
       << " dB never drops by 3 dB";
    throw Error(os.str());
  }
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(excess_drop, lo, hi, f_lo, f_hi,
                                                  boost::math::tools::eps_tolerance<double>(40),
                                                  max_iter);
  return 0.5 * (a + b);
}

SbsParams resolve_sbs(SbsParams params) {
  params.validate();
  if (!params.intrinsic_linewidth) params.intrinsic_linewidth = calibrate_linewidth(params);
  return params;
}

cplx sbs_transfer(double f, const SbsParams& params, double pump_offset) {
  const double g0 = params.peak_gain_nepers();
  if (g0 == 0.0) return {1.0, 0.0};
  const double dv =
      params.intrinsic_linewidth ? *params.intrinsic_linewidth : calibrate_linewidth(params);
  const double f_line = pump_offset - params.bfs;
  return std::exp((0.5 * g0) / cplx(1.0, 2.0 * (f - f_line) / dv));
}

OpticalEnvelope sbs_gain(const OpticalEnvelope& field, const SbsParams& params,
                         double pump_offset) {
  const double nyq = field.sample_rate / 2.0;
  const double f_line = pump_offset - params.bfs;
  if (!(f_line > -nyq && f_line < nyq)) {
    std::ostringstream os;
    os << "sbs_gain: gain line at " << f_line << " Hz lies outside Nyquist (+-" << nyq << ")";
    throw Error(os.str());
  }
  SbsParams p = params;
  if (p.peak_gain_db != 0.0) p = resolve_sbs(p);
  auto s = dsp::fft(field.samples);
  const std::size_t n = s.size();

  // Repeated calls on one grid (response scans, sweeps) reuse the transfer.
  struct Cached {
    std::size_t n = 0;
    double fs = 0, offset = 0, pump = 0, bfs = 0, dv = 0, gain = 0;
    std::vector<cplx> h;
  };
  thread_local Cached cache;
  const double dv = p.intrinsic_linewidth.value_or(0.0);
  if (cache.n != n || cache.fs != field.sample_rate || cache.offset != field.carrier_offset ||
      cache.pump != pump_offset || cache.bfs != p.bfs || cache.dv != dv || cache.gain != p.peak_gain_db) {
    cache = {n, field.sample_rate, field.carrier_offset, pump_offset, p.bfs, dv, p.peak_gain_db, {}};
    cache.h.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      cache.h[k] = sbs_transfer(bin_frequency(k, n, field.sample_rate) + field.carrier_offset, p, pump_offset);
    }
  }
  for (std::size_t k = 0; k < n; ++k) s[k] *= cache.h[k];
  OpticalEnvelope out = field;
  out.samples = dsp::ifft(s);
  return out;
}

SampledSignal photodetect(const OpticalEnvelope& field) {
  SampledSignal out;
  out.sample_rate = field.sample_rate;
  out.samples.resize(field.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.samples[i] = std::norm(field.samples[i]);
    mean += out.samples[i];
  }
  if (!out.samples.empty()) mean /= static_cast<double>(out.samples.size());
  for (auto& v : out.samples) v -= mean;
  return out;
}

SampledSignal electrical_bpf(const SampledSignal& signal, const BpfSpec& spec) {
  spec.validate(signal.sample_rate);
  auto s = dsp::fft(signal.samples);
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double f = std::abs(bin_frequency(k, n, signal.sample_rate));
    s[k] *= dsp::raised_cosine_mask(f, spec.band.low, spec.band.high, spec.edge_width);
  }
  SampledSignal out = signal;
  out.samples = dsp::ifft_real(s);
  return out;
}

double mpf_center_frequency(double f_ctrl, double bfs, int sideband_sign) {
  return sideband_sign < 0 ? std::abs(bfs - f_ctrl) : bfs + f_ctrl;
}

}  // namespace tvmpf
