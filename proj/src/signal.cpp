#include "tvmpf/signal.hpp"

#include <cmath>
#include <sstream>

namespace tvmpf {

void SampledSignal::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error("signal sample_rate must be positive and finite");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      std::ostringstream os;
      os << "signal sample " << i << " is not finite";
      throw Error(os.str());
    }
  }
}

void Band::validate(double sample_rate) const {
  if (!(low > 0.0 && low < high && high < sample_rate / 2.0)) {
    std::ostringstream os;
    os << "band [" << low << ", " << high << "] Hz must satisfy 0 < low < high < "
       << sample_rate / 2.0 << " (Nyquist at " << sample_rate << " S/s)";
    throw Error(os.str());
  }
}

void require_same_grid(const SampledSignal& a, const SampledSignal& b, const char* what) {
  if (a.size() != b.size() || a.sample_rate != b.sample_rate) {
    std::ostringstream os;
    os << what << ": length/rate mismatch (" << a.size() << " @ " << a.sample_rate << " vs "
       << b.size() << " @ " << b.sample_rate << ")";
    throw Error(os.str());
  }
}

}  // namespace tvmpf
