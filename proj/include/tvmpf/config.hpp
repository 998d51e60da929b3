#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "tvmpf/metrics.hpp"
#include "tvmpf/pipeline.hpp"

namespace tvmpf {

/// Configuration problem tied to one field of the JSON document.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ExperimentKind { kGen, kRun, kSweep, kResponse, kDemod };

struct SpectrogramOptions {
  std::size_t window_len = kDefaultWindowLen;
  std::size_t hop = kDefaultHop;
  Band display{2.0e9, 4.5e9};
};

struct ExperimentDescriptor {
  ExperimentKind kind = ExperimentKind::kRun;
  std::optional<double> snr_db = 8.0;  // empty: noise-free
  std::vector<double> snr_list;        // sweep points, dB
  std::size_t seeds_per_point = 5;
  std::vector<double> control_tones;   // response scan, Hz
  ScanGrid scan;
  SpectrogramOptions spectrogram;
};

struct ResolvedConfig {
  WaveformSpec waveform;
  ChainConfig chain;
  ExperimentDescriptor experiment;
};

/// Reads, applies defaults to, and validates a JSON config file.
ResolvedConfig parse_config(const std::filesystem::path& path);
ResolvedConfig parse_config_json(const nlohmann::json& doc);

/// Cross-field checks (Nyquist for signal and control, feasible control
/// shift, bit grid for phase codes). parse_config_json calls this; call it
/// again after programmatic overrides.
void validate_config(const ResolvedConfig& cfg);

/// Fully resolved echo of a configuration; parse_config_json(to_json(c))
/// reproduces c.
nlohmann::json to_json(const ResolvedConfig& cfg);

nlohmann::json waveform_to_json(const WaveformSpec& spec);
WaveformSpec waveform_from_json(const nlohmann::json& j, const std::string& where = "waveform");
ChainConfig chain_from_json(const nlohmann::json& j, const std::string& where = "chain");

/// Defaults for a waveform family name (lfm, nlfm, dlfm, fh, bpsk).
WaveformSpec default_waveform(std::string_view kind);

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view s);

/// "a:step:b" (inclusive), "a,b,c" or a single value.
std::vector<double> parse_list_or_range(std::string_view text);

/// -12 to 15.5 dB in 0.5 dB steps.
std::vector<double> default_snr_list();
/// 11.8 to 15.3 GHz in 0.5 GHz steps.
std::vector<double> default_control_tones();

}  // namespace tvmpf
