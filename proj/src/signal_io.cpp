#include "tvmpf/signal_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace tvmpf {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFormatName = "tvmpf-f64";

void put_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  std::array<char, 8> raw;
  std::memcpy(raw.data(), &bits, 8);
  out.append(raw.data(), 8);
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

json sidecar(const char* kind, double sample_rate, std::size_t length, double t0) {
  json j;
  j["format"] = kFormatName;
  j["version"] = kSignalFormatVersion;
  j["kind"] = kind;
  j["sample_rate"] = sample_rate;
  j["length"] = length;
  j["t0"] = t0;
  return j;
}

struct Header {
  std::string kind;
  double sample_rate = 0.0;
  std::size_t length = 0;
  double t0 = 0.0;
  double carrier_offset = 0.0;
};

Header read_header(const fs::path& payload) {
  const auto side = sidecar_path(payload);
  const auto malformed = [&](const std::string& why) {
    return Error("malformed header " + side.string() + ": " + why);
  };
  if (!fs::exists(side)) throw Error("missing header " + side.string());
  json j;
  try {
    j = json::parse(read_file(side));
  } catch (const json::exception& e) {
    throw malformed(e.what());
  }
  Header h;
  try {
    if (!j.is_object()) throw malformed("not a JSON object");
    if (j.at("format").get<std::string>() != kFormatName) throw malformed("unknown format");
    if (j.at("version").get<int>() != kSignalFormatVersion) throw malformed("unsupported version");
    h.kind = j.at("kind").get<std::string>();
    h.sample_rate = j.at("sample_rate").get<double>();
    h.length = j.at("length").get<std::size_t>();
    h.t0 = j.at("t0").get<double>();
    if (j.contains("carrier_offset")) h.carrier_offset = j.at("carrier_offset").get<double>();
  } catch (const json::exception& e) {
    throw malformed(e.what());
  }
  if (h.kind != "real" && h.kind != "complex-interleaved") throw malformed("unknown kind '" + h.kind + "'");
  if (!(h.sample_rate > 0.0) || !std::isfinite(h.sample_rate)) throw malformed("sample_rate must be > 0");
  return h;
}

std::string read_payload(const fs::path& path, std::size_t values) {
  auto bytes = read_file(path);
  if (bytes.size() != values * 8) {
    std::ostringstream os;
    os << "payload length mismatch in " << path.string() << ": header declares " << values
       << " float64 values (" << values * 8 << " bytes), file holds " << bytes.size() << " bytes";
    throw Error(os.str());
  }
  return bytes;
}

}  // namespace

fs::path sidecar_path(const fs::path& payload) {
  auto p = payload;
  p += ".json";
  return p;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename onto " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_signal(const SampledSignal& signal, const fs::path& path) {
  std::string payload;
  payload.reserve(signal.size() * 8);
  for (double v : signal.samples) put_le(payload, v);
  write_file_atomic(path, payload);
  write_file_atomic(sidecar_path(path), sidecar("real", signal.sample_rate, signal.size(), signal.t0).dump(2) + "\n");
}

SampledSignal read_signal(const fs::path& path) {
  const auto h = read_header(path);
  if (h.kind != "real") throw Error(path.string() + " holds a complex record; use read_envelope");
  const auto bytes = read_payload(path, h.length);
  SampledSignal s;
  s.sample_rate = h.sample_rate;
  s.t0 = h.t0;
  s.samples.resize(h.length);
  for (std::size_t i = 0; i < h.length; ++i) s.samples[i] = get_le(bytes.data() + 8 * i);
  return s;
}

void write_envelope(const OpticalEnvelope& field, const fs::path& path) {
  std::string payload;
  payload.reserve(field.size() * 16);
  for (const auto& v : field.samples) {
    put_le(payload, v.real());
    put_le(payload, v.imag());
  }
  auto side = sidecar("complex-interleaved", field.sample_rate, field.size(), 0.0);
  side["carrier_offset"] = field.carrier_offset;
  write_file_atomic(path, payload);
  write_file_atomic(sidecar_path(path), side.dump(2) + "\n");
}

OpticalEnvelope read_envelope(const fs::path& path) {
  const auto h = read_header(path);
  if (h.kind != "complex-interleaved") throw Error(path.string() + " holds a real record; use read_signal");
  const auto bytes = read_payload(path, 2 * h.length);
  OpticalEnvelope e;
  e.sample_rate = h.sample_rate;
  e.carrier_offset = h.carrier_offset;
  e.samples.resize(h.length);
  for (std::size_t i = 0; i < h.length; ++i) {
    e.samples[i] = {get_le(bytes.data() + 16 * i), get_le(bytes.data() + 16 * i + 8)};
  }
  return e;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf.data(), ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_field(header[i]);
  }
  out_ += "\r\n";
}

void CsvWriter::separator() {
  if (in_row_ == columns_) throw Error("CsvWriter: too many cells in row");
  if (in_row_) out_ += ',';
  ++in_row_;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  out_ += csv_field(text);
  return *this;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  out_ += format_number(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw Error("CsvWriter: row has the wrong number of cells");
  out_ += "\r\n";
  in_row_ = 0;
  ++rows_;
}

}  // namespace tvmpf
