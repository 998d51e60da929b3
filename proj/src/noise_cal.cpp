#include "tvmpf/noise_cal.hpp"

#include <cmath>
#include <sstream>

#include "tvmpf/fft.hpp"
#include "tvmpf/random.hpp"

namespace tvmpf {

double inband_power(const SampledSignal& signal, const Band& band) {
  band.validate(signal.sample_rate);
  const std::size_t n = signal.size();
  if (n == 0) return 0.0;
  const auto spec = dsp::fft(signal.samples);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (band.contains(std::abs(bin_frequency(k, n, signal.sample_rate)))) acc += std::norm(spec[k]);
  }
  const auto nn = static_cast<double>(n);
  return acc / (nn * nn);
}

SampledSignal calibrated_awgn(const SampledSignal& signal, const Band& band, double target_snr_db,
                              std::uint64_t seed) {
  const double p_signal = inband_power(signal, band);
  if (!(p_signal > 0.0)) throw Error("calibrated_awgn: signal has zero in-band power");

  const std::size_t n = signal.size();
  Rng rng(seed);
  std::vector<double> white(n);
  for (auto& v : white) v = rng.normal();
  auto spec = dsp::fft(white);
  for (std::size_t k = 0; k < n; ++k) {
    if (!band.contains(std::abs(bin_frequency(k, n, signal.sample_rate)))) spec[k] = 0.0;
  }

  SampledSignal noise;
  noise.sample_rate = signal.sample_rate;
  noise.t0 = signal.t0;
  noise.samples = dsp::ifft_real(spec);
  const double p_noise = inband_power(noise, band);
  if (!(p_noise > 0.0)) throw Error("calibrated_awgn: band contains no frequency bins");
  const double scale = std::sqrt(p_signal / (p_noise * std::pow(10.0, target_snr_db / 10.0)));
  for (auto& v : noise.samples) v *= scale;
  return noise;
}

double measure_snr(const SampledSignal& clean, const SampledSignal& noisy, const Band& band) {
  require_same_grid(clean, noisy, "measure_snr");
  const double p_clean = inband_power(clean, band);
  if (!(p_clean > 0.0)) throw Error("measure_snr: clean record has zero in-band power");
  SampledSignal diff = noisy;
  for (std::size_t i = 0; i < diff.size(); ++i) diff.samples[i] -= clean.samples[i];
  const double p_noise = inband_power(diff, band);
  if (p_noise == 0.0) return kNoNoiseSnr;
  return db10(p_clean / p_noise);
}

}  // namespace tvmpf
