#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "tvmpf/photonic_chain.hpp"
#include "tvmpf/random.hpp"

using namespace tvmpf;

namespace {

constexpr double kFs = 64e9;

SampledSignal real_tone(double f, double amp, std::size_t n) {
  SampledSignal s;
  s.sample_rate = kFs;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.samples[i] = amp * std::cos(2.0 * oracle::kPi * f * static_cast<double>(i) / kFs);
  return s;
}

// Complex line exp(j 2 pi f t) with f on the record's bin grid.
OpticalEnvelope line(double f, cplx amp, std::size_t n) {
  OpticalEnvelope e;
  e.sample_rate = kFs;
  e.samples.resize(n);
  const auto k = static_cast<long long>(std::llround(f * static_cast<double>(n) / kFs));
  const auto nn = static_cast<long long>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = ((static_cast<long long>(i) * k) % nn + nn) % nn;
    e.samples[i] = amp * std::polar(1.0, 2.0 * oracle::kPi * static_cast<double>(idx) / static_cast<double>(n));
  }
  return e;
}

double line_amplitude(const OpticalEnvelope& e, double f) {
  return static_cast<double>(std::abs(oracle::dft_bin(e.samples, f, e.sample_rate)));
}

double energy(const OpticalEnvelope& e) {
  double s = 0.0;
  for (const auto& v : e.samples) s += std::norm(v);
  return s;
}

double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

double power_gain_db(double f, const SbsParams& p, std::size_t n) {
  const auto in = line(f, 1.0, n);
  const auto out = sbs_gain(in, p);
  return 20.0 * std::log10(line_amplitude(out, f) / line_amplitude(in, f));
}

}  // namespace

TEST_CASE("mzm: zero drive gives zero field") {
  SampledSignal z;
  z.sample_rate = kFs;
  z.samples.assign(640, 0.0);
  const auto e = mzm_csdsb(z, MzmParams{});
  for (const auto& v : e.samples) REQUIRE(v == cplx(0.0, 0.0));
}

TEST_CASE("mzm: Bessel sidebands and carrier suppression") {
  const std::size_t n = 6400;  // 10 MHz bins
  const auto e = mzm_csdsb(real_tone(1e9, 1.0, n), MzmParams{0.5});
  const double first = line_amplitude(e, 1e9);
  CHECK(first == doctest::Approx(oracle::mzm_first_sideband(0.5)).epsilon(0.01));
  CHECK(line_amplitude(e, -1e9) == doctest::Approx(first).epsilon(1e-9));
  CHECK(line_amplitude(e, 3e9) == doctest::Approx(std::cyl_bessel_j(3.0, 0.5)).epsilon(0.01));
  for (double f : {0.0, 2e9, -2e9, 4e9}) {
    CHECK(20.0 * std::log10(line_amplitude(e, f) / first + 1e-300) < -60.0);
  }
  // The drive is normalized to unit peak before modulation.
  const auto e3 = mzm_csdsb(real_tone(1e9, 3.0, n), MzmParams{0.5});
  CHECK(rel_diff(e3.samples, e.samples) < 1e-12);
}

TEST_CASE("mzm parameter invariants") {
  CHECK_THROWS_AS(MzmParams{0.0}.validate(), Error);
  CHECK_THROWS_AS(MzmParams{4.0}.validate(), Error);
  CHECK_NOTHROW(MzmParams{3.0}.validate());
}

TEST_CASE("obpf selects one sideband") {
  const std::size_t n = 6400;
  const auto e = mzm_csdsb(real_tone(13.9e9, 1.0, n), MzmParams{0.5});
  const auto sel = obpf_select(e, ObpfSpec{12.9e9, 14.9e9, 50e6});
  const double kept = line_amplitude(sel, 13.9e9);
  CHECK(kept == doctest::Approx(line_amplitude(e, 13.9e9)).epsilon(1e-9));
  CHECK(20.0 * std::log10(line_amplitude(sel, -13.9e9) / kept + 1e-300) < -80.0);
}

TEST_CASE("obpf identity, rejection and idempotence") {
  const std::size_t n = 4096;
  Rng rng(3);
  OpticalEnvelope e;
  e.sample_rate = kFs;
  e.samples.resize(n);
  for (auto& v : e.samples) v = {rng.normal(), rng.normal()};

  const auto all = obpf_select(e, ObpfSpec{-kFs / 2, kFs / 2, 0.0});
  for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(all.samples[i] - e.samples[i]) < 1e-12);

  const auto tone = line(5e9, 1.0, n);
  const auto none = obpf_select(tone, ObpfSpec{-20e9, -10e9, 50e6});
  CHECK(energy(none) < 1e-8 * energy(tone));

  // Brick-wall masks are idempotent for any input.
  const ObpfSpec sharp{-15e9, -9e9, 0.0};
  const auto once = obpf_select(e, sharp);
  CHECK(rel_diff(obpf_select(once, sharp).samples, once.samples) < 1e-10);

  // With a raised-cosine edge the mask is 0 or 1 away from the edge strips,
  // so idempotence holds for inputs with no energy inside them.
  const ObpfSpec band{-15e9, -9e9, 50e6};
  const double df = kFs / static_cast<double>(n);
  OpticalEnvelope clear;
  clear.sample_rate = kFs;
  clear.samples.assign(n, cplx(0.0, 0.0));
  for (long k = -static_cast<long>(n) / 2; k < static_cast<long>(n) / 2; k += 3) {
    const double f = static_cast<double>(k) * df;
    if ((f > -15e9 - 100e6 && f < -15e9) || (f > -9e9 && f < -9e9 + 100e6)) continue;
    const auto l = line(f, cplx(rng.normal(), rng.normal()), n);
    for (std::size_t i = 0; i < n; ++i) clear.samples[i] += l.samples[i];
  }
  const auto c1 = obpf_select(clear, band);
  CHECK(rel_diff(obpf_select(c1, band).samples, c1.samples) < 1e-10);

  // Inside an edge strip a second pass applies the mask value again.
  const double f_edge = -9e9 + 25e6 - std::fmod(25e6, df);
  const auto probe = line(f_edge, 1.0, n);
  const double m = line_amplitude(obpf_select(probe, band), f_edge);
  CHECK(m > 0.05);
  CHECK(m < 0.95);
  CHECK(line_amplitude(obpf_select(obpf_select(probe, band), band), f_edge) == doctest::Approx(m * m).epsilon(1e-9));

  CHECK_THROWS_AS(obpf_select(e, ObpfSpec{-40e9, -10e9, 50e6}), Error);
  CHECK_THROWS_AS(obpf_select(e, ObpfSpec{-9e9, -15e9, 50e6}), Error);
}

TEST_CASE("pm: identity for zero drive, magnitude preserved") {
  const std::size_t n = 2048;
  Rng rng(9);
  OpticalEnvelope e;
  e.sample_rate = kFs;
  e.samples.resize(n);
  for (auto& v : e.samples) v = {rng.normal(), rng.normal()};
  SampledSignal zero;
  zero.sample_rate = kFs;
  zero.samples.assign(n, 0.0);
  CHECK(phase_modulate(e, zero, PmParams{0.3}).samples == e.samples);

  SampledSignal drive = zero;
  for (auto& v : drive.samples) v = 5.0 * rng.normal();
  const auto out = phase_modulate(e, drive, PmParams{0.7});
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(std::abs(out.samples[i]) == doctest::Approx(std::abs(e.samples[i])).epsilon(1e-15));
  }
  drive.samples.resize(n - 1);
  CHECK_THROWS_AS(phase_modulate(e, drive, PmParams{0.3}), Error);
  CHECK_THROWS_AS(PmParams{0.0}.validate(), Error);
}

TEST_CASE("pm: first sideband over carrier is J1/J0") {
  const std::size_t n = 6400;
  const auto carrier = line(0.0, 1.0, n);
  const auto out = phase_modulate(carrier, real_tone(3e9, 1.0, n), PmParams{0.3});
  const double ratio = line_amplitude(out, 3e9) / line_amplitude(out, 0.0);
  CHECK(ratio == doctest::Approx(oracle::pm_sideband_ratio(0.3)).epsilon(0.01));
  CHECK(ratio == doctest::Approx(0.1505).epsilon(0.01));
}

TEST_CASE("linewidth calibration matches the closed form") {
  for (double peak : {5.0, 10.0, 15.0, 25.0, 40.0}) {
    SbsParams p;
    p.peak_gain_db = peak;
    const double dv = calibrate_linewidth(p);
    CHECK(dv == doctest::Approx(oracle::linewidth(22.5e6, peak)).epsilon(1e-6));
    const double drop = oracle::lorentz_gain_db(0.0, dv, peak) - oracle::lorentz_gain_db(11.25e6, dv, peak);
    CHECK(std::abs(drop - 10.0 * std::log10(2.0)) < 0.01);
  }
  SbsParams p;
  CHECK(calibrate_linewidth(p) == doctest::Approx(44.9e6).epsilon(0.01));
  CHECK(resolve_sbs(p).intrinsic_linewidth.value() == calibrate_linewidth(p));
}

TEST_CASE("linewidth calibration errors") {
  SbsParams p;
  p.target_bw3db = 0.0;
  CHECK_THROWS_AS(calibrate_linewidth(p), Error);
  SbsParams low;
  low.peak_gain_db = 2.0;  // a 3 dB drop is impossible below 3.01 dB of gain
  CHECK_THROWS_AS(calibrate_linewidth(low), Error);
  SbsParams neg;
  neg.peak_gain_db = -1.0;
  CHECK_THROWS_AS(calibrate_linewidth(neg), Error);
}

TEST_CASE("sbs gain at resonance, at the half-power points and far away") {
  const std::size_t n = 256000;  // 250 kHz bins
  SbsParams p;
  CHECK(std::abs(power_gain_db(-10.8e9, p, n) - 15.0) < 0.01);
  CHECK(std::abs(power_gain_db(-10.8e9 + 11.25e6, p, n) - 12.0) < 0.05);
  CHECK(std::abs(power_gain_db(-10.8e9 - 11.25e6, p, n) - 12.0) < 0.05);
  CHECK(std::abs(power_gain_db(-9.8e9, p, n)) < 0.1);
  CHECK(std::abs(power_gain_db(-10.8e9 + 11.25e6, p, n) -
                 (15.0 - oracle::lorentz_gain_db(0.0, oracle::linewidth(22.5e6, 15.0), 15.0) +
                  oracle::lorentz_gain_db(11.25e6, oracle::linewidth(22.5e6, 15.0), 15.0))) < 0.01);
}

TEST_CASE("sbs transfer has the Lorentzian phase") {
  SbsParams p = resolve_sbs(SbsParams{});
  const double dv = *p.intrinsic_linewidth;
  const double g0 = p.peak_gain_nepers();
  const double d = 7e6;
  const cplx h = sbs_transfer(-10.8e9 + d, p, 0.0);
  const cplx expect = std::exp(cplx(g0 / 2.0, 0.0) / cplx(1.0, 2.0 * d / dv));
  CHECK(std::abs(h - expect) < 1e-12 * std::abs(expect));
  CHECK(std::arg(h) < 0.0);
  // The pump offset moves the line.
  CHECK(std::abs(sbs_transfer(-9.8e9, p, 1e9)) == doctest::Approx(std::abs(sbs_transfer(-10.8e9, p, 0.0))));
}

TEST_CASE("sbs gain is linear and shift invariant") {
  const std::size_t n = 8192;
  Rng rng(21);
  OpticalEnvelope x;
  x.sample_rate = kFs;
  x.samples.resize(n);
  OpticalEnvelope y = x;
  for (auto& v : x.samples) v = {rng.normal(), rng.normal()};
  for (auto& v : y.samples) v = {rng.normal(), rng.normal()};
  const cplx a(0.7, -1.3);
  const cplx b(-2.1, 0.4);
  OpticalEnvelope mix = x;
  for (std::size_t i = 0; i < n; ++i) mix.samples[i] = a * x.samples[i] + b * y.samples[i];
  const SbsParams p;
  const auto gx = sbs_gain(x, p);
  const auto gy = sbs_gain(y, p);
  const auto gm = sbs_gain(mix, p);
  std::vector<cplx> combo(n);
  for (std::size_t i = 0; i < n; ++i) combo[i] = a * gx.samples[i] + b * gy.samples[i];
  CHECK(rel_diff(gm.samples, combo) < 1e-10);

  const std::size_t shift = 777;
  OpticalEnvelope xs = x;
  std::rotate(xs.samples.begin(), xs.samples.begin() + static_cast<long>(n - shift), xs.samples.end());
  auto expect = gx.samples;
  std::rotate(expect.begin(), expect.begin() + static_cast<long>(n - shift), expect.end());
  CHECK(rel_diff(sbs_gain(xs, p).samples, expect) < 1e-10);
}

TEST_CASE("sbs line outside Nyquist is rejected; zero gain is identity") {
  OpticalEnvelope e = line(1e9, 1.0, 1024);
  SbsParams far;
  far.bfs = 40e9;
  CHECK_THROWS_AS(sbs_gain(e, far), Error);
  SbsParams flat;
  flat.peak_gain_db = 0.0;
  CHECK(rel_diff(sbs_gain(e, flat).samples, e.samples) < 1e-12);
}

TEST_CASE("photodetect: square law with DC removed") {
  OpticalEnvelope c;
  c.sample_rate = kFs;
  c.samples.assign(512, cplx(0.3, -0.4));
  for (double v : photodetect(c).samples) REQUIRE(std::abs(v) < 1e-15);

  const std::size_t n = 6400;
  const double a = 0.8;
  const double b = 0.3;
  auto e = line(13e9, a, n);
  const auto l2 = line(16e9, b, n);
  for (std::size_t i = 0; i < n; ++i) e.samples[i] += l2.samples[i];
  const auto y = photodetect(e);
  // |a e1 + b e2|^2 = a^2 + b^2 + 2ab cos(2 pi (f2 - f1) t): the AC part is the beat.
  CHECK(oracle::mean_square(y.samples) == doctest::Approx(2.0 * a * a * b * b).epsilon(1e-9));
  CHECK(static_cast<double>(std::abs(oracle::dft_bin(y.samples, 3e9, kFs))) == doctest::Approx(a * b).epsilon(1e-9));

  Rng rng(4);
  OpticalEnvelope r;
  r.sample_rate = kFs;
  r.samples.resize(1000);
  for (auto& v : r.samples) v = {rng.normal(), rng.normal()};
  const auto yr = photodetect(r);
  double mean = 0.0;
  for (const auto& v : r.samples) mean += std::norm(v);
  mean /= 1000.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    REQUIRE(yr.samples[i] + mean >= -1e-12);
    REQUIRE(yr.samples[i] == doctest::Approx(std::norm(r.samples[i]) - mean).epsilon(1e-12));
  }
}

TEST_CASE("electrical bpf passband, stopband and idempotence") {
  const std::size_t n = 6400;
  const BpfSpec bpf;
  const auto in3 = real_tone(3e9, 1.0, n);
  const auto out3 = electrical_bpf(in3, bpf);
  CHECK(std::abs(10.0 * std::log10(oracle::mean_square(out3.samples) / oracle::mean_square(in3.samples))) < 0.1);
  const auto in2 = real_tone(2e9, 1.0, n);
  const auto out2 = electrical_bpf(in2, bpf);
  CHECK(10.0 * std::log10(oracle::mean_square(out2.samples) / oracle::mean_square(in2.samples) + 1e-300) < -60.0);

  SampledSignal zero;
  zero.sample_rate = kFs;
  zero.samples.assign(n, 0.0);
  for (double v : electrical_bpf(zero, bpf).samples) REQUIRE(v == 0.0);

  // Idempotent for inputs with no energy in the edge strips just outside the band.
  Rng rng(8);
  SampledSignal w = zero;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * kFs / static_cast<double>(n);
    if ((f > 2.4e9 - 100e6 && f < 2.4e9) || (f > 4.0e9 && f < 4.0e9 + 100e6)) continue;
    const double a = rng.normal();
    const double ph = rng.uniform() * 2.0 * oracle::kPi;
    for (std::size_t i = 0; i < n; ++i) {
      w.samples[i] += a * std::cos(2.0 * oracle::kPi * f * static_cast<double>(i) / kFs + ph);
    }
  }
  const auto once = electrical_bpf(w, bpf);
  const auto twice = electrical_bpf(once, bpf);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (twice.samples[i] - once.samples[i]) * (twice.samples[i] - once.samples[i]);
    den += once.samples[i] * once.samples[i];
  }
  CHECK(std::sqrt(num / den) < 1e-10);
  CHECK_THROWS_AS(electrical_bpf(w, BpfSpec{Band{2.4e9, 40e9}, 50e6}), Error);
}

TEST_CASE("passband center mapping") {
  CHECK(mpf_center_frequency(11.8e9, 10.8e9, -1) == doctest::Approx(1.0e9));
  CHECK(mpf_center_frequency(15.3e9, 10.8e9, -1) == doctest::Approx(4.5e9));
  CHECK(mpf_center_frequency(10.8e9, 10.8e9, -1) == 0.0);
  CHECK(mpf_center_frequency(2.5e9, 10.8e9, +1) == doctest::Approx(13.3e9));
}

TEST_CASE("chain with zero SBS gain equals the chain without SBS") {
  const std::size_t n = 8192;
  const auto ctrl = real_tone(13.9e9, 1.0, n);
  Rng rng(2);
  SampledSignal drive;
  drive.sample_rate = kFs;
  drive.samples.resize(n);
  for (auto& v : drive.samples) v = rng.normal();
  const auto carrier = obpf_select(mzm_csdsb(ctrl, MzmParams{}), ObpfSpec{-15e9, -12e9, 50e6});
  const auto pm = phase_modulate(carrier, drive, PmParams{});
  SbsParams flat;
  flat.peak_gain_db = 0.0;
  const auto with = photodetect(sbs_gain(pm, flat));
  const auto without = photodetect(pm);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (with.samples[i] - without.samples[i]) * (with.samples[i] - without.samples[i]);
    den += without.samples[i] * without.samples[i];
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}
