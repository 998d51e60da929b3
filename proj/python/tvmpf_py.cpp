#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tvmpf/config.hpp"
#include "tvmpf/metrics.hpp"
#include "tvmpf/pipeline.hpp"

namespace py = pybind11;
using namespace tvmpf;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SampledSignal from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a, double fs) {
  if (a.ndim() != 1) throw Error("expected a one-dimensional array");
  SampledSignal s;
  s.sample_rate = fs;
  s.samples.assign(a.data(), a.data() + a.size());
  return s;
}

ResolvedConfig config_from(const std::string& text) {
  return parse_config_json(text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text));
}

py::dict run(const std::string& config_json) {
  const auto cfg = config_from(config_json);
  RunArtifacts a;
  {
    py::gil_scoped_release release;
    a = Experiment(cfg.waveform, cfg.chain).run(cfg.experiment.snr_db, cfg.chain.seed);
  }
  py::dict d;
  d["sample_rate"] = cfg.chain.sample_rate;
  d["noisy_input"] = to_array(a.noisy_input.samples);
  d["reference"] = to_array(a.reference.samples);
  d["filtered"] = to_array(a.filtered.samples);
  d["mse_before"] = a.mse_before;
  d["mse_after"] = a.mse_after;
  d["measured_snr_db"] = a.metadata.measured_snr_db;
  d["config"] = to_json(cfg).dump();
  return d;
}

py::tuple synthesize_waveform(const std::string& config_json) {
  const auto cfg = config_from(config_json);
  const auto [sig, track] = synthesize(cfg.waveform, cfg.chain.sample_rate, cfg.chain.duration, cfg.chain.waveform_seed);
  py::list comps;
  for (const auto& c : track.components) comps.append(to_array(c));
  return py::make_tuple(to_array(sig.samples), comps);
}

py::dict passband(double f_ctrl, const std::string& config_json) {
  const auto cfg = config_from(config_json);
  PassbandMeasurement m;
  {
    py::gil_scoped_release release;
    m = scan_passband(f_ctrl, cfg.chain, cfg.experiment.scan);
  }
  std::vector<double> f, r;
  for (const auto& p : m.curve) {
    f.push_back(p.freq);
    r.push_back(p.response_db);
  }
  py::dict d;
  d["f_ctrl"] = m.f_ctrl;
  d["expected_center"] = m.expected_center;
  d["peak_freq"] = m.peak_freq;
  d["peak_db"] = m.peak_db;
  d["bw3db"] = m.bw3db;
  d["freq"] = to_array(f);
  d["response_db"] = to_array(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SBS time-varying microwave photonic filter simulator";
  m.attr("__version__") = TVMPF_VERSION;
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<Error>(m, "TvmpfError", PyExc_ValueError);

  m.def("run", &run, py::arg("config_json") = "",
        "Run one experiment from a JSON config string; returns waveforms and MSE values.");
  m.def("synthesize", &synthesize_waveform, py::arg("config_json") = "",
        "Synthesize the configured waveform; returns (samples, [track components]).");
  m.def("scan_passband", &passband, py::arg("f_ctrl"), py::arg("config_json") = "");
  m.def("resolve_config", [](const std::string& text) { return to_json(config_from(text)).dump(); },
        py::arg("config_json") = "");
  m.def(
      "mse",
      [](py::array_t<double> candidate, py::array_t<double> reference, double fs, std::optional<std::size_t> max_lag) {
        return mse(from_array(candidate, fs), from_array(reference, fs), max_lag);
      },
      py::arg("candidate"), py::arg("reference"), py::arg("sample_rate") = 64e9, py::arg("max_lag") = py::none());
}
