#include "tvmpf/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvmpf/fft.hpp"
#include "tvmpf/random.hpp"

namespace tvmpf {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t segment_index(std::size_t i, double samples_per_segment) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(i) / samples_per_segment + 1e-9));
}

void check_chirp(double f_start, double f_stop, double period, const char* name) {
  if (!(period > 0.0)) throw Error(std::string(name) + ": period must be > 0");
  if (!(f_start > 0.0) || !(f_stop > 0.0)) {
    throw Error(std::string(name) + ": f_start and f_stop must be > 0");
  }
  if (f_start == f_stop) {
    throw Error(std::string(name) + ": degenerate chirp (f_start == f_stop)");
  }
}

struct PhaseSample {
  double phase;
  double freq;
};

PhaseSample lfm_at(const Lfm& p, double tau) {
  const double k = (p.f_stop - p.f_start) / p.period;
  return {kTwoPi * (p.f_start * tau + 0.5 * k * tau * tau), p.f_start + k * tau};
}

PhaseSample nlfm_at(const Nlfm& p, double tau) {
  const double bw = p.f_stop - p.f_start;
  const double T = p.period;
  if (p.profile == NlfmProfile::kQuadratic) {
    const double u = tau / T;
    return {kTwoPi * (p.f_start * tau + bw * tau * u * u / 3.0), p.f_start + bw * u * u};
  }
  const double fc = 0.5 * (p.f_start + p.f_stop);
  const double arg = kPi * (2.0 * tau / T - 1.0);
  const double integral = -(0.5 * bw) * (T / kTwoPi) * (std::cos(arg) + 1.0);
  return {kTwoPi * (fc * tau + integral), fc + 0.5 * bw * std::sin(arg)};
}

std::size_t samples_per_bit(const PhaseCoded& pc, double sample_rate) {
  const double spb = pc.period * sample_rate / static_cast<double>(pc.n_bits);
  const double rounded = std::round(spb);
  if (rounded < 1.0 || std::abs(spb - rounded) > 1e-6 * std::max(1.0, spb)) {
    std::ostringstream os;
    os << "phase-coded: " << pc.n_bits << " bits do not divide the " << pc.period * sample_rate
       << " samples of one period exactly";
    throw Error(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

double WaveformSpec::period() const {
  return std::visit(Overloaded{
                        [](const Lfm& p) { return p.period; },
                        [](const Nlfm& p) { return p.period; },
                        [](const Dlfm& p) { return p.up.period; },
                        [](const Fh& p) { return p.dwell * static_cast<double>(p.freqs.size()); },
                        [](const PhaseCoded& p) { return p.period; },
                    },
                    shape);
}

std::pair<double, double> WaveformSpec::frequency_range() const {
  auto mm = [](double a, double b) { return std::pair{std::min(a, b), std::max(a, b)}; };
  return std::visit(
      Overloaded{
          [&](const Lfm& p) { return mm(p.f_start, p.f_stop); },
          [&](const Nlfm& p) { return mm(p.f_start, p.f_stop); },
          [&](const Dlfm& p) {
            auto a = mm(p.up.f_start, p.up.f_stop);
            auto b = mm(p.down.f_start, p.down.f_stop);
            return std::pair{std::min(a.first, b.first), std::max(a.second, b.second)};
          },
          [&](const Fh& p) {
            if (p.freqs.empty()) return std::pair{0.0, 0.0};
            auto [lo, hi] = std::minmax_element(p.freqs.begin(), p.freqs.end());
            return std::pair{*lo, *hi};
          },
          [&](const PhaseCoded& p) { return std::pair{p.carrier, p.carrier}; },
      },
      shape);
}

std::size_t WaveformSpec::component_count() const {
  return std::holds_alternative<Dlfm>(shape) ? 2 : 1;
}

std::string WaveformSpec::kind() const {
  return std::visit(Overloaded{
                        [](const Lfm&) { return std::string("lfm"); },
                        [](const Nlfm&) { return std::string("nlfm"); },
                        [](const Dlfm&) { return std::string("dlfm"); },
                        [](const Fh&) { return std::string("fh"); },
                        [](const PhaseCoded&) { return std::string("bpsk"); },
                    },
                    shape);
}

void WaveformSpec::validate() const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw Error("amplitude must be > 0");
  std::visit(Overloaded{
                 [](const Lfm& p) { check_chirp(p.f_start, p.f_stop, p.period, "lfm"); },
                 [](const Nlfm& p) { check_chirp(p.f_start, p.f_stop, p.period, "nlfm"); },
                 [](const Dlfm& p) {
                   check_chirp(p.up.f_start, p.up.f_stop, p.up.period, "dlfm.up");
                   check_chirp(p.down.f_start, p.down.f_stop, p.down.period, "dlfm.down");
                   if (p.up.period != p.down.period) {
                     throw Error("dlfm: up and down chirps must share one period");
                   }
                 },
                 [](const Fh& p) {
                   if (p.freqs.empty()) throw Error("fh: frequency list is empty");
                   if (!(p.dwell > 0.0)) throw Error("fh: dwell must be > 0");
                   for (double f : p.freqs) {
                     if (!(f > 0.0)) throw Error("fh: all frequencies must be > 0");
                   }
                 },
                 [](const PhaseCoded& p) {
                   if (!(p.carrier > 0.0)) throw Error("bpsk: carrier must be > 0");
                   if (p.n_bits == 0) throw Error("bpsk: n_bits must be > 0");
                   if (!(p.period > 0.0)) throw Error("bpsk: period must be > 0");
                   if (!p.code.empty() && p.code.size() != p.n_bits) {
                     throw Error("bpsk: explicit code length must equal n_bits");
                   }
                 },
             },
             shape);
}

std::vector<std::uint8_t> phase_code(const PhaseCoded& pc, std::uint64_t seed) {
  if (!pc.code.empty()) {
    std::vector<std::uint8_t> code(pc.code);
    for (auto& b : code) b = b ? 1 : 0;
    return code;
  }
  Rng rng(seed);
  std::vector<std::uint8_t> code(pc.n_bits);
  for (auto& b : code) b = rng.bit() ? 1 : 0;
  return code;
}

std::pair<SampledSignal, FrequencyTrack> synthesize(const WaveformSpec& spec, double sample_rate,
                                                    double duration, std::uint64_t seed) {
  spec.validate();
  const auto [f_lo, f_hi] = spec.frequency_range();
  if (!(sample_rate >= 2.5 * f_hi)) {
    std::ostringstream os;
    os << "Nyquist violation: sample_rate " << sample_rate << " < 2.5 x highest frequency " << f_hi;
    throw Error(os.str());
  }
  const double period = spec.period();
  const double periods = duration / period;
  if (!(duration > 0.0) || std::round(periods) < 1.0 ||
      std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods)) {
    std::ostringstream os;
    os << "duration " << duration << " s is not an integer number of periods (" << period << " s)";
    throw Error(os.str());
  }

  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  const double samples_per_period = period * sample_rate;
  const double amp = spec.amplitude;

  SampledSignal sig;
  sig.sample_rate = sample_rate;
  sig.samples.assign(n, 0.0);
  FrequencyTrack track;
  track.components.assign(spec.component_count(), std::vector<double>(n, 0.0));

  auto time_in_period = [&](std::size_t i) {
    const std::size_t p = segment_index(i, samples_per_period);
    if (i > 0 && segment_index(i - 1, samples_per_period) != p) track.transitions.push_back(i);
    return (static_cast<double>(i) - static_cast<double>(p) * samples_per_period) / sample_rate;
  };

  std::visit(
      Overloaded{
          [&](const Lfm& p) {
            for (std::size_t i = 0; i < n; ++i) {
              auto s = lfm_at(p, time_in_period(i));
              sig.samples[i] = amp * std::cos(s.phase);
              track.components[0][i] = s.freq;
            }
          },
          [&](const Nlfm& p) {
            for (std::size_t i = 0; i < n; ++i) {
              auto s = nlfm_at(p, time_in_period(i));
              sig.samples[i] = amp * std::cos(s.phase);
              track.components[0][i] = s.freq;
            }
          },
          [&](const Dlfm& p) {
            for (std::size_t i = 0; i < n; ++i) {
              const double tau = time_in_period(i);
              auto u = lfm_at(p.up, tau);
              auto d = lfm_at(p.down, tau);
              sig.samples[i] = amp * (std::cos(u.phase) + std::cos(d.phase));
              track.components[0][i] = u.freq;
              track.components[1][i] = d.freq;
            }
          },
          [&](const Fh& p) {
            const double samples_per_dwell = p.dwell * sample_rate;
            for (std::size_t i = 0; i < n; ++i) {
              const std::size_t hop = segment_index(i, samples_per_dwell);
              if (i > 0 && segment_index(i - 1, samples_per_dwell) != hop) {
                track.transitions.push_back(i);
              }
              const double f = p.freqs[hop % p.freqs.size()];
              const double t = static_cast<double>(i) / sample_rate;
              const double local =
                  p.phase_mode == FhPhaseMode::kReset
                      ? (static_cast<double>(i) - static_cast<double>(hop) * samples_per_dwell) /
                            sample_rate
                      : t;
              sig.samples[i] = amp * std::cos(kTwoPi * f * local);
              track.components[0][i] = f;
            }
          },
          [&](const PhaseCoded& p) {
            const std::size_t spb = samples_per_bit(p, sample_rate);
            const auto code = phase_code(p, seed);
            std::uint8_t prev = code[0];
            for (std::size_t i = 0; i < n; ++i) {
              const std::uint8_t b = code[(i / spb) % p.n_bits];
              if (i > 0 && b != prev) track.transitions.push_back(i);
              prev = b;
              const double t = static_cast<double>(i) / sample_rate;
              sig.samples[i] = amp * std::cos(kTwoPi * p.carrier * t + (b ? kPi : 0.0));
              track.components[0][i] = p.carrier;
            }
          },
      },
      spec.shape);

  std::sort(track.transitions.begin(), track.transitions.end());
  track.transitions.erase(std::unique(track.transitions.begin(), track.transitions.end()),
                          track.transitions.end());
  return {std::move(sig), std::move(track)};
}

WaveformSpec derive_control(const WaveformSpec& spec, double bfs, int sideband_sign) {
  if (sideband_sign != 1 && sideband_sign != -1) throw Error("sideband_sign must be +1 or -1");
  if (!(bfs > 0.0)) throw Error("bfs must be > 0");
  auto map = [&](double f) {
    const double fc = sideband_sign < 0 ? bfs + f : f - bfs;
    if (!(fc > 0.0)) {
      std::ostringstream os;
      os << "infeasible control: frequency " << f << " Hz maps to non-positive control " << fc
         << " Hz for sideband_sign " << sideband_sign << " and bfs " << bfs;
      throw Error(os.str());
    }
    return fc;
  };
  WaveformSpec out = spec;
  std::visit(Overloaded{
                 [&](Lfm& p) {
                   p.f_start = map(p.f_start);
                   p.f_stop = map(p.f_stop);
                 },
                 [&](Nlfm& p) {
                   p.f_start = map(p.f_start);
                   p.f_stop = map(p.f_stop);
                 },
                 [&](Dlfm& p) {
                   p.up.f_start = map(p.up.f_start);
                   p.up.f_stop = map(p.up.f_stop);
                   p.down.f_start = map(p.down.f_start);
                   p.down.f_stop = map(p.down.f_stop);
                 },
                 [&](Fh& p) {
                   for (auto& f : p.freqs) f = map(f);
                 },
                 [&](PhaseCoded& p) { p.carrier = map(p.carrier); },
             },
             out.shape);
  return out;
}

double instantaneous_frequency_error(const SampledSignal& signal, const FrequencyTrack& track) {
  if (track.component_count() != 1) {
    throw Error("instantaneous_frequency_error: requires a single-component track");
  }
  const auto& f = track.components[0];
  if (f.size() != signal.size()) throw Error("instantaneous_frequency_error: track/signal length mismatch");
  const std::size_t n = signal.size();
  if (n < 2 * kTransitionGuard + 2) throw Error("instantaneous_frequency_error: record too short");

  const auto z = dsp::analytic_signal(signal.samples);
  std::vector<bool> excluded(n, false);
  for (std::size_t t : track.transitions) {
    const std::size_t lo = t > kTransitionGuard ? t - kTransitionGuard : 0;
    const std::size_t hi = std::min(n, t + kTransitionGuard);
    for (std::size_t i = lo; i < hi; ++i) excluded[i] = true;
  }
  double acc = 0.0;
  std::size_t count = 0;
  // One-sample phase increments stay below pi because fs >= 2.5 f_max.
  for (std::size_t i = kTransitionGuard; i + 1 < n - kTransitionGuard; ++i) {
    if (excluded[i] || excluded[i + 1]) continue;
    const double est = std::arg(z[i + 1] * std::conj(z[i])) * signal.sample_rate / kTwoPi;
    const double truth = 0.5 * (f[i] + f[i + 1]);
    acc += (est - truth) * (est - truth);
    ++count;
  }
  if (count == 0) throw Error("instantaneous_frequency_error: no samples left after exclusions");
  return std::sqrt(acc / static_cast<double>(count));
}

}  // namespace tvmpf
