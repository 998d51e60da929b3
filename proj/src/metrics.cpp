#include "tvmpf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvmpf/fft.hpp"
#include "tvmpf/pipeline.hpp"

namespace tvmpf {
namespace {

struct Aligned {
  std::vector<double> candidate;
  std::vector<double> reference;
};

std::size_t default_max_lag(std::size_t longest) {
  return std::max<std::size_t>(1, (longest + 99) / 100);
}

void check_mse_inputs(const SampledSignal& candidate, const SampledSignal& reference) {
  if (candidate.sample_rate != reference.sample_rate) throw Error("mse: sample rate mismatch");
  const std::size_t longest = std::max(candidate.size(), reference.size());
  const std::size_t shortest = std::min(candidate.size(), reference.size());
  if (shortest == 0) throw Error("mse: empty record");
  if (static_cast<double>(longest - shortest) > 0.01 * static_cast<double>(longest)) {
    std::ostringstream os;
    os << "mse: lengths " << candidate.size() << " and " << reference.size()
       << " differ by more than 1%";
    throw Error(os.str());
  }
}

std::vector<double> padded(const std::vector<double>& x, std::size_t n) {
  std::vector<double> out(x);
  out.resize(n, 0.0);
  return out;
}

long find_lag(const SampledSignal& candidate, const SampledSignal& reference,
              std::optional<std::size_t> max_lag) {
  const std::size_t n = std::max(candidate.size(), reference.size());
  const auto c = dsp::fft(padded(candidate.samples, n));
  const auto r = dsp::fft(padded(reference.samples, n));
  std::vector<cplx> prod(n);
  for (std::size_t k = 0; k < n; ++k) prod[k] = c[k] * std::conj(r[k]);
  const auto xc = dsp::ifft_real(prod);  // xc[m] = sum_i c[i + m] r[i]

  const auto w = static_cast<long>(std::min(max_lag.value_or(default_max_lag(n)), n - 1));
  const auto nl = static_cast<long>(n);
  auto at = [&](long lag) { return std::abs(xc[static_cast<std::size_t>(((lag % nl) + nl) % nl)]); };
  double best = 0.0;
  for (long lag = -w; lag <= w; ++lag) best = std::max(best, at(lag));
  const double tie = best * (1.0 - 1e-9);
  for (long d = 0; d <= w; ++d) {
    if (at(d) >= tie) return d;
    if (at(-d) >= tie) return -d;
  }
  return 0;
}

Aligned align(const SampledSignal& candidate, const SampledSignal& reference, long lag) {
  const std::size_t n = std::max(candidate.size(), reference.size());
  const std::size_t m = std::min(candidate.size(), reference.size());
  const auto c = padded(candidate.samples, n);
  const auto nl = static_cast<long>(n);
  Aligned out;
  out.candidate.resize(m);
  out.reference.assign(reference.samples.begin(), reference.samples.begin() + static_cast<long>(m));
  for (std::size_t i = 0; i < m; ++i) {
    out.candidate[i] = c[static_cast<std::size_t>(((static_cast<long>(i) + lag) % nl + nl) % nl)];
  }
  return out;
}

}  // namespace

long best_lag(const SampledSignal& candidate, const SampledSignal& reference,
              std::optional<std::size_t> max_lag) {
  check_mse_inputs(candidate, reference);
  return find_lag(candidate, reference, max_lag);
}

double mse(const SampledSignal& candidate, const SampledSignal& reference,
           std::optional<std::size_t> max_lag) {
  check_mse_inputs(candidate, reference);
  double ref_energy = 0.0;
  for (double v : reference.samples) ref_energy += v * v;
  if (!(ref_energy > 0.0)) throw Error("mse: reference has zero energy");

  const auto a = align(candidate, reference, find_lag(candidate, reference, max_lag));
  double cr = 0.0;
  double cc = 0.0;
  double rr = 0.0;
  for (std::size_t i = 0; i < a.candidate.size(); ++i) {
    cr += a.candidate[i] * a.reference[i];
    cc += a.candidate[i] * a.candidate[i];
    rr += a.reference[i] * a.reference[i];
  }
  if (!(rr > 0.0)) throw Error("mse: reference has zero energy after trimming");
  const double gain = cc > 0.0 ? cr / cc : 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < a.candidate.size(); ++i) {
    const double d = gain * a.candidate[i] - a.reference[i];
    err += d * d;
  }
  return err / rr;
}

double Spectrogram::bin_width() const {
  return window_len == 0 ? 0.0 : sample_rate / static_cast<double>(window_len);
}

Spectrogram spectrogram(const SampledSignal& signal, std::size_t window_len, std::size_t hop,
                        std::optional<Band> display) {
  if (hop == 0) throw Error("spectrogram: hop must be >= 1");
  if (window_len < 2) throw Error("spectrogram: window_len must be >= 2");
  if (window_len > signal.size()) {
    std::ostringstream os;
    os << "spectrogram: window of " << window_len << " samples is longer than the record ("
       << signal.size() << ")";
    throw Error(os.str());
  }
  Spectrogram sg;
  sg.window_len = window_len;
  sg.hop = hop;
  sg.sample_rate = signal.sample_rate;

  std::vector<double> window(window_len);
  for (std::size_t i = 0; i < window_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(window_len));
  }
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k <= window_len / 2; ++k) {
    const double f = static_cast<double>(k) * signal.sample_rate / static_cast<double>(window_len);
    if (!display || (f >= display->low && f <= display->high)) {
      keep.push_back(k);
      sg.bin_freqs.push_back(f);
    }
  }

  for (std::size_t st = 0; st + window_len <= signal.size(); st += hop) sg.frame_starts.push_back(st);
  if (sg.frame_starts.back() + window_len < signal.size()) {
    sg.frame_starts.push_back(signal.size() - window_len);
  }

  std::vector<double> frame(window_len);
  for (std::size_t st : sg.frame_starts) {
    for (std::size_t i = 0; i < window_len; ++i) frame[i] = signal.samples[st + i] * window[i];
    const auto spec = dsp::fft(frame);
    std::vector<double> row;
    row.reserve(keep.size());
    for (std::size_t k : keep) {
      const double p = std::norm(spec[k]);
      row.push_back(p > 0.0 ? std::max(kPowerFloorDb, db10(p)) : kPowerFloorDb);
    }
    sg.power_db.push_back(std::move(row));
    sg.frame_times.push_back(signal.t0 + (static_cast<double>(st) + 0.5 * static_cast<double>(window_len)) /
                                             signal.sample_rate);
  }
  return sg;
}

double ridge_frequency(const Spectrogram& sg, std::size_t frame, std::optional<Band> search) {
  if (frame >= sg.frames()) throw Error("ridge_frequency: frame index out of range");
  const auto& row = sg.power_db[frame];
  std::size_t best = row.size();
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (search && !search->contains(sg.bin_freqs[k])) continue;
    if (best == row.size() || row[k] > row[best]) best = k;
  }
  if (best == row.size()) throw Error("ridge_frequency: no bins inside the search band");
  if (best == 0 || best + 1 >= row.size()) return sg.bin_freqs[best];
  const double a = row[best - 1];
  const double b = row[best];
  const double c = row[best + 1];
  const double denom = a - 2.0 * b + c;
  const double offset = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
  return sg.bin_freqs[best] + offset * (sg.bin_freqs[best + 1] - sg.bin_freqs[best]);
}

BpskRecovery recover_bpsk_phase(const SampledSignal& signal, double carrier, double bit_duration) {
  if (!(bit_duration > 0.0)) throw Error("recover_bpsk_phase: bit_duration must be > 0");
  const double spb_exact = bit_duration * signal.sample_rate;
  const double spb_round = std::round(spb_exact);
  const std::size_t n = signal.size();
  if (spb_round < 1.0 || std::abs(spb_exact - spb_round) > 1e-6 * spb_exact ||
      n % static_cast<std::size_t>(spb_round) != 0) {
    std::ostringstream os;
    os << "recover_bpsk_phase: record of " << n << " samples is not an integer number of "
       << spb_exact << "-sample bits";
    throw Error(os.str());
  }
  const auto spb = static_cast<std::size_t>(spb_round);
  const std::size_t n_bits = n / spb;
  const std::size_t skip = spb / 5;

  const auto z = dsp::analytic_signal(signal.samples);
  std::vector<cplx> avg(n_bits);
  for (std::size_t b = 0; b < n_bits; ++b) {
    cplx acc = 0.0;
    const std::size_t lo = b * spb + skip;
    const std::size_t hi = (b + 1) * spb - skip;
    for (std::size_t i = lo; i < hi; ++i) {
      acc += z[i] * std::polar(1.0, -kTwoPi * carrier * signal.time_at(i));
    }
    avg[b] = acc / static_cast<double>(hi - lo);
  }

  BpskRecovery out;
  out.phases.resize(n_bits);
  out.bits.resize(n_bits);
  for (std::size_t b = 0; b < n_bits; ++b) {
    out.phases[b] = std::arg(avg[b] * std::conj(avg[0]));
    out.bits[b] = std::abs(out.phases[b]) > 0.5 * kPi ? 1 : 0;
  }
  return out;
}

std::size_t count_bit_errors(const std::vector<std::uint8_t>& bits,
                             const std::vector<std::uint8_t>& code) {
  if (bits.size() != code.size() || code.empty()) {
    throw Error("count_bit_errors: decision and code lengths differ");
  }
  std::size_t errors = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if ((bits[k] != 0) != ((code[k] != 0) != (code[0] != 0))) ++errors;
  }
  return errors;
}

double mse_improvement(double mse_before, double mse_after) {
  if (!(mse_before > 0.0)) throw Error("mse_improvement: mse_before must be > 0");
  if (mse_after == 0.0) return kPerfectImprovement;
  return db10(mse_before / mse_after);
}

double mse_improvement(const RunArtifacts& artifacts) {
  return mse_improvement(artifacts.mse_before, artifacts.mse_after);
}

}  // namespace tvmpf
