#include "tvmpf/manifest.hpp"

#include <cmath>
#include <memory>

#include <openssl/evp.h>

#include "tvmpf/metrics.hpp"
#include "tvmpf/signal_io.hpp"

namespace tvmpf {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void RunManifest::add_output(const fs::path& dir, const std::string& relative) {
  const auto bytes = read_file(dir / relative);
  outputs.push_back({relative, sha256_hex(bytes), bytes.size()});
}

json RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["tool_version"] = tool_version;
  j["config"] = config;
  j["seeds"] = seeds;
  j["runs"] = json::array();
  for (const auto& r : runs) {
    json row;
    row["waveform"] = r.waveform;
    row["seed"] = r.seed;
    row["seeds"] = r.seeds;
    row["snr_db"] = r.snr_db ? json(*r.snr_db) : json(nullptr);
    row["measured_snr_db"] = finite_or_null(r.measured_snr_db);
    row["mse_before"] = r.mse_before;
    row["mse_after"] = r.mse_after;
    row["improvement_db"] =
        r.mse_before > 0.0 ? finite_or_null(mse_improvement(r.mse_before, r.mse_after)) : json(nullptr);
    j["runs"].push_back(row);
  }
  j["outputs"] = json::array();
  for (const auto& o : outputs) {
    j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  }
  j["wall_clock_s"] = wall_clock_s;
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config = j.at("config");
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& row : j.at("runs")) {
      ManifestRun r;
      r.waveform = row.at("waveform").get<std::string>();
      r.seed = row.at("seed").get<std::uint64_t>();
      r.seeds = row.at("seeds").get<std::size_t>();
      if (!row.at("snr_db").is_null()) r.snr_db = row.at("snr_db").get<double>();
      r.measured_snr_db = number_or(row, "measured_snr_db", INFINITY);
      r.mse_before = row.at("mse_before").get<double>();
      r.mse_after = row.at("mse_after").get<double>();
      m.runs.push_back(r);
    }
    for (const auto& o : j.at("outputs")) {
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>(),
                           o.at("bytes").get<std::uintmax_t>()});
    }
    m.wall_clock_s = j.at("wall_clock_s").get<double>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const RunManifest& manifest, const fs::path& file) {
  write_file_atomic(file, manifest.to_json().dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw Error("malformed manifest " + file.string() + ": " + e.what());
  }
  return RunManifest::from_json(j);
}

VerifyReport verify_manifest(const fs::path& file) {
  const auto m = read_manifest(file);
  const auto dir = file.parent_path();
  VerifyReport report;
  for (const auto& o : m.outputs) {
    ++report.checked;
    const auto p = dir / o.path;
    if (!fs::exists(p)) {
      report.problems.push_back(o.path + ": missing");
      continue;
    }
    const auto bytes = read_file(p);
    if (bytes.size() != o.bytes) {
      report.problems.push_back(o.path + ": size " + std::to_string(bytes.size()) + " != " +
                                std::to_string(o.bytes));
    } else if (sha256_hex(bytes) != o.sha256) {
      report.problems.push_back(o.path + ": checksum mismatch");
    }
  }
  return report;
}

}  // namespace tvmpf
