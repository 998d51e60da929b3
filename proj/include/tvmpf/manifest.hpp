#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tvmpf {

inline constexpr const char* kManifestName = "manifest.json";

struct ManifestRun {
  std::string waveform;
  std::uint64_t seed = 0;
  std::optional<double> snr_db;  // empty: noise-free
  double measured_snr_db = 0.0;
  double mse_before = 0.0;
  double mse_after = 0.0;
  std::size_t seeds = 1;  // > 1 for sweep rows (means over seeds)
};

struct ManifestOutput {
  std::string path;  // relative to the manifest's directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Record of one CLI invocation. Every listed output carries its checksum;
/// wall_clock_s is the only field that varies between identical runs.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string tool_version;
  std::vector<std::uint64_t> seeds;
  std::vector<ManifestRun> runs;
  std::vector<ManifestOutput> outputs;
  double wall_clock_s = 0.0;

  /// Hashes dir/relative and appends it to outputs.
  void add_output(const std::filesystem::path& dir, const std::string& relative);

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& file);
RunManifest read_manifest(const std::filesystem::path& file);

struct VerifyReport {
  std::size_t checked = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Recomputes every output checksum listed in the manifest.
VerifyReport verify_manifest(const std::filesystem::path& file);

}  // namespace tvmpf
