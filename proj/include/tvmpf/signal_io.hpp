#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tvmpf/signal.hpp"

namespace tvmpf {

/// Signal files are a raw little-endian float64 payload plus a JSON sidecar
/// named `<payload>.json` holding sample_rate, length, t0 and kind.
inline constexpr int kSignalFormatVersion = 1;

std::filesystem::path sidecar_path(const std::filesystem::path& payload);

void write_signal(const SampledSignal& signal, const std::filesystem::path& path);
SampledSignal read_signal(const std::filesystem::path& path);

/// Complex records are stored interleaved (re, im, re, im, ...).
void write_envelope(const OpticalEnvelope& field, const std::filesystem::path& path);
OpticalEnvelope read_envelope(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_number(double v);

/// RFC 4180 field quoting (only when the field needs it).
std::string csv_field(std::string_view text);

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  void end_row();

  std::size_t columns() const { return columns_; }
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return out_; }

 private:
  void separator();

  std::string out_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
};

}  // namespace tvmpf
