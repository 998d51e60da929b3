#pragma once

#include <cstdint>
#include <limits>

#include "tvmpf/signal.hpp"

namespace tvmpf {

/// Returned by measure_snr when the noisy record equals the clean one.
inline constexpr double kNoNoiseSnr = std::numeric_limits<double>::infinity();

/// Mean-square value of the signal component with |f| in [band.low, band.high],
/// by Parseval over the full record.
double inband_power(const SampledSignal& signal, const Band& band);

/// Gaussian noise, brick-wall band-limited to `band`, scaled so that
/// inband_power(signal) / inband_power(noise) = 10^(target_snr_db / 10).
SampledSignal calibrated_awgn(const SampledSignal& signal, const Band& band, double target_snr_db,
                              std::uint64_t seed);

/// 10 log10(P_in(clean) / P_in(noisy - clean)); kNoNoiseSnr if the difference
/// has no in-band power.
double measure_snr(const SampledSignal& clean, const SampledSignal& noisy, const Band& band);

}  // namespace tvmpf
