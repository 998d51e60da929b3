#include "tvmpf/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace tvmpf::dsp {
namespace {

// The FFTW planner is not thread-safe; executing an existing plan through the
// new-array interface is. FFTW_UNALIGNED lets us run plans on std::vector data.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

std::vector<cplx> execute(std::vector<cplx> data, int sign) {
  if (data.empty()) return data;
  std::vector<cplx> out(data.size());
  fftw_plan plan = cache().get(data.size(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cplx> fft(std::span<const cplx> x) {
  return execute(std::vector<cplx>(x.begin(), x.end()), FFTW_FORWARD);
}

std::vector<cplx> fft(std::span<const double> x) {
  std::vector<cplx> data(x.begin(), x.end());
  return execute(std::move(data), FFTW_FORWARD);
}

std::vector<cplx> ifft(std::span<const cplx> x) {
  auto out = execute(std::vector<cplx>(x.begin(), x.end()), FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> ifft_real(std::span<const cplx> x) {
  auto c = ifft(x);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

std::vector<cplx> analytic_signal(std::span<const double> x) {
  auto spec = fft(x);
  const std::size_t n = spec.size();
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) {
      spec[k] *= 2.0;
    } else if (2 * k > n) {
      spec[k] = 0.0;
    }
  }
  return ifft(spec);
}

double raised_cosine_mask(double f, double lo, double hi, double edge) {
  if (f >= lo && f <= hi) return 1.0;
  if (edge <= 0.0) return 0.0;
  const double d = f < lo ? lo - f : f - hi;
  if (d >= edge) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * d / edge));
}

}  // namespace tvmpf::dsp
