#include "tvmpf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "tvmpf/fft.hpp"
#include "tvmpf/metrics.hpp"

namespace tvmpf {
namespace {

SampledSignal circular_delay(SampledSignal s, double delay) {
  const auto n = static_cast<long>(s.size());
  if (n == 0) return s;
  const long shift = std::lround(delay * s.sample_rate) % n;
  if (shift == 0) return s;
  std::vector<double> out(s.size());
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(((i + shift) % n + n) % n)] = s.samples[static_cast<std::size_t>(i)];
  s.samples = std::move(out);
  return s;
}

double half_power_db() { return 10.0 * std::log10(2.0); }

}  // namespace

void ChainConfig::validate() const {
  if (!(sample_rate > 0.0)) throw Error("chain.sample_rate must be > 0");
  if (!(duration > 0.0)) throw Error("chain.duration must be > 0");
  if (sideband_sign != 1 && sideband_sign != -1) throw Error("chain.sideband_sign must be +1 or -1");
  mzm.validate();
  pm.validate();
  sbs.validate();
  bpf.validate(sample_rate);
  noise_band.validate(sample_rate);
  if (!std::isfinite(pump_offset)) throw Error("chain.pump_offset must be finite");
  if (!std::isfinite(control_skew)) throw Error("chain.control_skew must be finite");
  if (obpf) {
    obpf->validate(sample_rate);
    if (sideband_sign < 0 && obpf->high > 0.0) {
      throw Error("chain.obpf must select negative optical offsets when sideband_sign is -1");
    }
    if (sideband_sign > 0 && obpf->low < 0.0) {
      throw Error("chain.obpf must select positive optical offsets when sideband_sign is +1");
    }
  }
}

ObpfSpec auto_obpf(const WaveformSpec& control, int sideband_sign, double sample_rate) {
  const auto [lo, hi] = control.frequency_range();
  const double nyq = sample_rate / 2.0;
  const double low = std::max(lo - kObpfMargin, kDefaultEdgeWidth);
  const double high = std::min(hi + kObpfMargin, nyq - kDefaultEdgeWidth);
  if (!(low < high)) throw Error("auto_obpf: control band does not fit below Nyquist");
  ObpfSpec spec;
  spec.edge_width = kDefaultEdgeWidth;
  if (sideband_sign < 0) {
    spec.low = -high;
    spec.high = -low;
  } else {
    spec.low = low;
    spec.high = high;
  }
  return spec;
}

ObpfSpec resolve_obpf(const ChainConfig& cfg, const WaveformSpec& control) {
  if (cfg.obpf) return *cfg.obpf;
  return auto_obpf(control, cfg.sideband_sign, cfg.sample_rate);
}

Experiment::Experiment(WaveformSpec spec, ChainConfig cfg) : spec_(std::move(spec)), cfg_(std::move(cfg)) {
  cfg_.validate();
  spec_.validate();
  cfg_.sbs = resolve_sbs(cfg_.sbs);
  control_spec_ = derive_control(spec_, cfg_.sbs.bfs, cfg_.sideband_sign);
  obpf_ = resolve_obpf(cfg_, control_spec_);
  cfg_.obpf = obpf_;

  std::tie(signal_, track_) = synthesize(spec_, cfg_.sample_rate, cfg_.duration, cfg_.waveform_seed);
  control_ = circular_delay(
      synthesize(control_spec_, cfg_.sample_rate, cfg_.duration, cfg_.waveform_seed).first,
      cfg_.control_skew);
  carrier_ = obpf_select(mzm_csdsb(control_, cfg_.mzm), obpf_);
  reference_ = through_chain(signal_);
  reference_direct_ = electrical_bpf(signal_, cfg_.bpf);
}

SampledSignal Experiment::through_chain(const SampledSignal& drive) const {
  auto field = phase_modulate(carrier_, drive, cfg_.pm);
  field = sbs_gain(field, cfg_.sbs, cfg_.pump_offset);
  return electrical_bpf(photodetect(field), cfg_.bpf);
}

SampledSignal Experiment::noisy_drive(std::optional<double> snr_db, std::uint64_t seed) const {
  SampledSignal drive = signal_;
  if (snr_db) {
    const auto noise = calibrated_awgn(signal_, cfg_.noise_band, *snr_db, seed);
    for (std::size_t i = 0; i < drive.size(); ++i) drive.samples[i] += noise.samples[i];
  }
  return drive;
}

RunArtifacts Experiment::run(std::optional<double> snr_db, std::uint64_t seed) const {
  const auto drive = noisy_drive(snr_db, seed);
  RunArtifacts out;
  out.filtered = through_chain(drive);
  out.noisy_input = electrical_bpf(drive, cfg_.bpf);
  out.reference = reference_;
  out.mse_before = mse(out.noisy_input, reference_direct_);
  out.mse_after = mse(out.filtered, reference_);
  out.snr_target = snr_db;
  out.metadata.waveform = spec_.kind();
  out.metadata.sideband_sign = cfg_.sideband_sign;
  out.metadata.seed = seed;
  out.metadata.snr_db = snr_db;
  out.metadata.measured_snr_db = measure_snr(signal_, drive, cfg_.noise_band);
  return out;
}

MsePair Experiment::run_mse(std::optional<double> snr_db, std::uint64_t seed) const {
  const auto drive = noisy_drive(snr_db, seed);
  MsePair out;
  out.mse_before = mse(electrical_bpf(drive, cfg_.bpf), reference_direct_);
  out.mse_after = mse(through_chain(drive), reference_);
  return out;
}

RunArtifacts run_experiment(const WaveformSpec& spec, std::optional<double> snr_db,
                            const ChainConfig& cfg) {
  return Experiment(spec, cfg).run(snr_db, cfg.seed);
}

SampledSignal behavioral_filter(const SampledSignal& signal, const FrequencyTrack& track,
                                const SbsParams& sbs) {
  if (track.component_count() != 1) throw Error("behavioral_filter: requires a single-component track");
  const auto& f = track.components[0];
  if (f.size() != signal.size()) throw Error("behavioral_filter: track/signal length mismatch");
  if (!(sbs.target_bw3db > 0.0)) throw Error("behavioral_filter: target_bw3db must be > 0");
  const std::size_t n = signal.size();
  if (n == 0) return signal;

  std::vector<double> phase(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) phase[i] = phase[i - 1] + kPi * (f[i - 1] + f[i]) / signal.sample_rate;

  auto z = dsp::analytic_signal(signal.samples);
  for (std::size_t i = 0; i < n; ++i) z[i] *= std::polar(1.0, -phase[i]);
  auto spec = dsp::fft(z);
  const double half_width = 0.5 * sbs.target_bw3db;
  for (std::size_t k = 0; k < n; ++k) {
    spec[k] /= cplx(1.0, bin_frequency(k, n, signal.sample_rate) / half_width);
  }
  z = dsp::ifft(spec);
  const double field_gain = std::pow(10.0, sbs.peak_gain_db / 20.0);
  SampledSignal out = signal;
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = field_gain * (z[i] * std::polar(1.0, phase[i])).real();
  return out;
}

std::vector<ResponsePoint> measure_response(double f_ctrl, const ChainConfig& cfg,
                                            std::span<const double> probe_freqs) {
  ChainConfig c = cfg;
  c.validate();
  c.sbs = resolve_sbs(c.sbs);
  const auto n = static_cast<std::size_t>(std::llround(c.duration * c.sample_rate));
  if (n < 2) throw Error("measure_response: record too short");
  const double record = static_cast<double>(n) / c.sample_rate;
  const double nyq = c.sample_rate / 2.0;
  auto bin_of = [&](double f) { return static_cast<std::size_t>(std::llround(f * record)); };
  // Exact-modulo twiddle table: tone k at sample i is twiddle[(i * k) % n].
  std::vector<cplx> twiddle(n);
  for (std::size_t i = 0; i < n; ++i) {
    twiddle[i] = std::polar(1.0, kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  }
  auto tone = [&](std::size_t k) {
    SampledSignal s;
    s.sample_rate = c.sample_rate;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.samples[i] = twiddle[(i * k) % n].real();
    return s;
  };
  auto bin_power = [&](const SampledSignal& s, std::size_t k) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += s.samples[i] * std::conj(twiddle[(i * k) % n]);
    return std::norm(acc);
  };

  if (!(f_ctrl > 0.0 && f_ctrl < nyq)) throw Error("measure_response: control tone outside Nyquist");
  const std::size_t k_ctrl = bin_of(f_ctrl);
  WaveformSpec ctrl_spec;
  ctrl_spec.shape = Fh{{static_cast<double>(k_ctrl) / record}, record, FhPhaseMode::kContinuousPerTone};
  const auto carrier = obpf_select(mzm_csdsb(tone(k_ctrl), c.mzm), resolve_obpf(c, ctrl_spec));

  std::vector<ResponsePoint> out(probe_freqs.size());
  for (double fp : probe_freqs) {
    if (!(fp > 0.0 && fp < nyq)) {
      std::ostringstream os;
      os << "measure_response: probe " << fp << " Hz outside Nyquist";
      throw Error(os.str());
    }
  }
  parallel_for(probe_freqs.size(), 0, [&](std::size_t j) {
    const std::size_t k = bin_of(probe_freqs[j]);
    const auto drive = tone(k);
    auto field = sbs_gain(phase_modulate(carrier, drive, c.pm), c.sbs, c.pump_offset);
    const auto y = photodetect(field);
    out[j].freq = static_cast<double>(k) / record;
    out[j].response_db = db10(bin_power(y, k) / bin_power(drive, k));
  });
  return out;
}

PassbandMeasurement scan_passband(double f_ctrl, const ChainConfig& cfg, const ScanGrid& grid) {
  if (!(grid.coarse_step > 0.0 && grid.fine_step > 0.0 && grid.coarse_low < grid.coarse_high)) {
    throw Error("scan_passband: invalid scan grid");
  }
  PassbandMeasurement m;
  m.f_ctrl = f_ctrl;
  m.expected_center = mpf_center_frequency(f_ctrl, cfg.sbs.bfs, cfg.sideband_sign);

  std::vector<double> coarse;
  for (double f = grid.coarse_low; f <= grid.coarse_high + 1e-6; f += grid.coarse_step) coarse.push_back(f);
  const auto coarse_resp = measure_response(f_ctrl, cfg, coarse);
  const auto coarse_peak = std::max_element(coarse_resp.begin(), coarse_resp.end(),
                                            [](auto& a, auto& b) { return a.response_db < b.response_db; });

  std::vector<double> fine;
  const auto steps = static_cast<long>(std::floor(grid.fine_half_span / grid.fine_step));
  for (long s = -steps; s <= steps; ++s) {
    const double f = coarse_peak->freq + static_cast<double>(s) * grid.fine_step;
    if (f > 0.0) fine.push_back(f);
  }
  const auto fine_resp = measure_response(f_ctrl, cfg, fine);

  const auto peak = static_cast<std::size_t>(
      std::max_element(fine_resp.begin(), fine_resp.end(),
                       [](auto& a, auto& b) { return a.response_db < b.response_db; }) -
      fine_resp.begin());
  m.peak_freq = fine_resp[peak].freq;
  m.peak_db = fine_resp[peak].response_db;
  if (peak > 0 && peak + 1 < fine_resp.size()) {
    const double a = fine_resp[peak - 1].response_db;
    const double b = fine_resp[peak].response_db;
    const double c = fine_resp[peak + 1].response_db;
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) {
      const double p = 0.5 * (a - c) / denom;
      m.peak_freq += p * (fine_resp[peak + 1].freq - fine_resp[peak].freq);
      m.peak_db = b - 0.25 * (a - c) * p;
    }
  }

  const double level = m.peak_db - half_power_db();
  auto crossing = [&](long dir) {
    for (long i = static_cast<long>(peak); i + dir >= 0 && i + dir < static_cast<long>(fine_resp.size()); i += dir) {
      const auto& p0 = fine_resp[static_cast<std::size_t>(i)];
      const auto& p1 = fine_resp[static_cast<std::size_t>(i + dir)];
      if (p1.response_db < level) {
        const double t = (p0.response_db - level) / (p0.response_db - p1.response_db);
        return p0.freq + t * (p1.freq - p0.freq);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  m.bw3db = crossing(+1) - crossing(-1);

  m.curve = coarse_resp;
  m.curve.insert(m.curve.end(), fine_resp.begin(), fine_resp.end());
  std::sort(m.curve.begin(), m.curve.end(), [](auto& a, auto& b) { return a.freq < b.freq; });
  m.curve.erase(std::unique(m.curve.begin(), m.curve.end(), [](auto& a, auto& b) { return a.freq == b.freq; }),
                m.curve.end());
  return m;
}

std::vector<SweepRow> run_sweep(const WaveformSpec& spec, std::span<const double> snr_list,
                                const ChainConfig& cfg, std::size_t seeds_per_point,
                                unsigned threads) {
  if (snr_list.empty()) throw Error("run_sweep: SNR list is empty");
  if (seeds_per_point == 0) throw Error("run_sweep: seeds_per_point must be >= 1");
  const Experiment exp(spec, cfg);
  const std::size_t jobs = snr_list.size() * seeds_per_point;
  std::vector<MsePair> results(jobs);
  parallel_for(jobs, threads, [&](std::size_t j) {
    const std::size_t point = j / seeds_per_point;
    const std::size_t s = j % seeds_per_point;
    results[j] = exp.run_mse(snr_list[point], cfg.seed + s);
  });

  std::vector<SweepRow> rows(snr_list.size());
  for (std::size_t p = 0; p < snr_list.size(); ++p) {
    rows[p].snr_db = snr_list[p];
    rows[p].seeds = seeds_per_point;
    for (std::size_t s = 0; s < seeds_per_point; ++s) {
      rows[p].mse_before += results[p * seeds_per_point + s].mse_before;
      rows[p].mse_after += results[p * seeds_per_point + s].mse_after;
    }
    rows[p].mse_before /= static_cast<double>(seeds_per_point);
    rows[p].mse_after /= static_cast<double>(seeds_per_point);
  }
  std::stable_sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.snr_db < b.snr_db; });
  return rows;
}

}  // namespace tvmpf
