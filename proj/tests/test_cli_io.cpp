#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "doctest.h"
#include "tvmpf/cli.hpp"
#include "tvmpf/config.hpp"
#include "tvmpf/manifest.hpp"
#include "tvmpf/signal_io.hpp"

using namespace tvmpf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("tvmpf_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tvmpf");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string field_error(const json& doc) {
  try {
    parse_config_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("minimal config resolves every default") {
  const auto cfg = parse_config_json(json::parse(R"({"waveform": {"type": "lfm"}})"));
  const auto echo = to_json(cfg);
  CHECK(echo["chain"]["sample_rate"] == 64e9);
  CHECK(echo["chain"]["sbs"]["bfs"] == 10.8e9);
  CHECK(echo["chain"]["sbs"]["target_bw3db"] == 22.5e6);
  CHECK(echo["chain"]["bpf"]["low"] == 2.4e9);
  CHECK(echo["chain"]["bpf"]["high"] == 4.0e9);
  CHECK(echo["chain"]["obpf"]["auto"] == true);
  CHECK(echo["chain"]["sbs"]["intrinsic_linewidth"].get<double>() > 22.5e6);
  CHECK(echo["waveform"]["f_start"] == 2.5e9);
  CHECK(echo["waveform"]["f_stop"] == 3.7e9);
  CHECK(echo["experiment"]["snr_list"].size() == 56);
}

TEST_CASE("config echo round trips") {
  for (const char* text : {R"({"waveform": {"type": "fh", "freqs": [2.5e9, 2.8e9, 3.1e9, 3.4e9], "dwell": 1e-8}})",
                           R"({"waveform": {"type": "bpsk", "code": [0,1,1,0], "n_bits": 4, "period": 4e-8},
                               "chain": {"duration": 4e-8}})",
                           R"({"waveform": {"type": "dlfm"}, "experiment": {"kind": "sweep", "snr_list": "-3:1:3"}})",
                           R"({"waveform": {"type": "nlfm", "profile": "sinusoidal"}, "chain": {"obpf": {"low": -16e9, "high": -12e9}}})",
                           R"({"waveform": {"type": "lfm", "f_start": 13.3e9, "f_stop": 13.8e9},
                               "chain": {"sideband_sign": 1, "bpf": {"low": 13.0e9, "high": 14.1e9},
                                         "noise_band": {"low": 13.0e9, "high": 14.1e9}}})"}) {
    const auto cfg = parse_config_json(json::parse(text));
    const auto echo = to_json(cfg);
    CHECK(to_json(parse_config_json(echo)) == echo);
  }
}

TEST_CASE("config errors name the offending fields") {
  const auto chirp = field_error(json::parse(R"({"waveform": {"type": "lfm", "f_start": 3e9, "f_stop": 2e9}})"));
  CHECK(chirp.find("waveform.f_start") != std::string::npos);
  CHECK(chirp.find("waveform.f_stop") != std::string::npos);

  const auto nyq = field_error(json::parse(R"({"chain": {"bpf": {"low": 2.4e9, "high": 40e9}}})"));
  CHECK(nyq.find("chain") != std::string::npos);
  CHECK(nyq.find("4e+10") != std::string::npos);

  const auto sig = field_error(json::parse(R"({"waveform": {"type": "lfm", "f_start": 2e9, "f_stop": 30e9}})"));
  CHECK(sig.find("waveform") != std::string::npos);

  const auto ctrl = field_error(json::parse(R"({"chain": {"sample_rate": 32e9}})"));
  CHECK(ctrl.find("control") != std::string::npos);

  CHECK(field_error(json::parse(R"({"waveform": {"type": "lfm", "bogus": 1}})")).find("waveform.bogus") != std::string::npos);
  CHECK(field_error(json::parse(R"({"chain": {"sbs": {"bfs": "x"}}})")).find("chain.sbs.bfs") != std::string::npos);
  CHECK(field_error(json::parse(R"({"waveform": {"type": "chirp"}})")).find("waveform.type") != std::string::npos);
  CHECK(field_error(json::parse(R"({"chain": {"duration": 3e-6}})")).find("chain.duration") != std::string::npos);
  CHECK(field_error(json::parse(R"({"chain": {"sideband_sign": 1}})")).find("sideband_sign") != std::string::npos);
  CHECK(field_error(json::parse(R"({"experiment": {"kind": "plot"}})")).find("experiment.kind") != std::string::npos);
  CHECK(field_error(json::parse(R"([1, 2])")) != "");
}

TEST_CASE("config file parsing") {
  const auto dir = scratch("cfg");
  write_text(dir / "ok.json", R"({"waveform": {"type": "fh"}, "chain": {"seed": 9}})");
  CHECK(parse_config(dir / "ok.json").chain.seed == 9);
  write_text(dir / "bad.json", R"({"waveform": )");
  CHECK_THROWS_AS(parse_config(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(parse_config(dir / "missing.json"), Error);
}

TEST_CASE("list and range parsing") {
  CHECK(parse_list_or_range("-12:0.5:15.5").size() == 56);
  CHECK(parse_list_or_range("-12:0.5:15.5").back() == 15.5);
  CHECK(parse_list_or_range("11.8e9,12.5e9,13.9e9") == std::vector<double>{11.8e9, 12.5e9, 13.9e9});
  CHECK(parse_list_or_range("8") == std::vector<double>{8.0});
  CHECK(parse_list_or_range("+3") == std::vector<double>{3.0});
  CHECK(default_control_tones().size() == 8);
  CHECK_THROWS_AS(parse_list_or_range("1:2"), Error);
  CHECK_THROWS_AS(parse_list_or_range("3:0:5"), Error);
  CHECK_THROWS_AS(parse_list_or_range("a,b"), Error);
  CHECK_THROWS_AS(parse_list_or_range(""), Error);
}

TEST_CASE("signal files round trip bit-exactly") {
  const auto dir = scratch("io");
  for (const char* kind : {"lfm", "nlfm", "dlfm", "fh", "bpsk"}) {
    auto spec = default_waveform(kind);
    auto sig = synthesize(spec, 64e9, 4e-6, 17).first;
    sig.t0 = 1.25e-7;
    const auto path = dir / (std::string(kind) + ".f64");
    write_signal(sig, path);
    const auto back = read_signal(path);
    CHECK(back.samples == sig.samples);
    CHECK(back.sample_rate == sig.sample_rate);
    CHECK(back.t0 == sig.t0);
    CHECK(fs::file_size(path) == sig.size() * 8);
  }
  SampledSignal odd;
  odd.sample_rate = 3.0;
  odd.samples = {0.1, -0.0, 5e-324, 1.7976931348623157e308, -2.5};
  write_signal(odd, dir / "odd.f64");
  const auto back = read_signal(dir / "odd.f64");
  for (std::size_t i = 0; i < odd.size(); ++i) {
    CHECK(std::memcmp(&back.samples[i], &odd.samples[i], 8) == 0);
  }
  const auto sidecar = json::parse(read_file(dir / "odd.f64.json"));
  CHECK(sidecar["kind"] == "real");
  CHECK(sidecar["length"] == 5);
  CHECK(sidecar["sample_rate"] == 3.0);
}

TEST_CASE("payload is little-endian float64") {
  const auto dir = scratch("endian");
  SampledSignal s;
  s.sample_rate = 1.0;
  s.samples = {1.0};
  write_signal(s, dir / "one.f64");
  const auto bytes = read_file(dir / "one.f64");
  const std::string expect("\x00\x00\x00\x00\x00\x00\xf0\x3f", 8);
  CHECK(bytes == expect);
}

TEST_CASE("complex envelopes round trip") {
  const auto dir = scratch("env");
  OpticalEnvelope e;
  e.sample_rate = 64e9;
  e.carrier_offset = -1e9;
  for (int i = 0; i < 100; ++i) e.samples.emplace_back(std::sin(i * 0.1), std::cos(i * 0.37));
  write_envelope(e, dir / "e.f64");
  const auto back = read_envelope(dir / "e.f64");
  CHECK(back.samples == e.samples);
  CHECK(back.carrier_offset == e.carrier_offset);
  CHECK(json::parse(read_file(dir / "e.f64.json"))["kind"] == "complex-interleaved");
  CHECK_THROWS_AS(read_signal(dir / "e.f64"), Error);
}

TEST_CASE("malformed and inconsistent signal files are rejected") {
  const auto dir = scratch("bad");
  SampledSignal s;
  s.sample_rate = 64e9;
  s.samples.assign(100, 0.5);
  write_signal(s, dir / "s.f64");
  const auto header = read_file(dir / "s.f64.json");

  write_text(dir / "s.f64.json", header.substr(0, header.size() / 2));
  CHECK_THROWS_WITH_AS(read_signal(dir / "s.f64"), doctest::Contains("malformed header"), Error);

  write_text(dir / "s.f64.json", R"({"format": "tvmpf-f64", "version": 1, "kind": "real", "sample_rate": 64e9, "t0": 0})");
  CHECK_THROWS_WITH_AS(read_signal(dir / "s.f64"), doctest::Contains("malformed header"), Error);

  write_text(dir / "s.f64.json", header);
  const auto payload = read_file(dir / "s.f64");
  write_text(dir / "s.f64", payload.substr(0, 400));
  CHECK_THROWS_WITH_AS(read_signal(dir / "s.f64"), doctest::Contains("length mismatch"), Error);

  write_text(dir / "s.f64", payload + std::string(8, '\0'));
  CHECK_THROWS_WITH_AS(read_signal(dir / "s.f64"), doctest::Contains("length mismatch"), Error);

  fs::remove(dir / "s.f64.json");
  CHECK_THROWS_AS(read_signal(dir / "s.f64"), Error);
}

TEST_CASE("atomic writes leave no temporary files") {
  const auto dir = scratch("atomic");
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  CHECK(read_file(dir / "a.txt") == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
}

TEST_CASE("csv formatting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-12.0) == "-12");
  CHECK(format_number(64e9) == "6.4e+10");
  CHECK(std::stod(format_number(64e9)) == 64e9);
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CsvWriter w({"a", "b,c"});
  w.cell(1.5).cell("x").end_row();
  CHECK(w.str() == "a,\"b,c\"\r\n1.5,x\r\n");
  CHECK_THROWS_AS(w.cell(1.0).end_row(), Error);
}

TEST_CASE("sha256 and manifest verification") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = scratch("manifest");
  write_text(dir / "data.csv", "x\r\n1\r\n");
  RunManifest m;
  m.command = "run";
  m.tool_version = version();
  m.config = {{"k", 1}};
  m.seeds = {1};
  m.runs.push_back({"lfm", 1, 8.0, 8.0, 0.1, 0.01, 1});
  m.add_output(dir, "data.csv");
  write_manifest(m, dir / "run.manifest.json");
  const auto back = read_manifest(dir / "run.manifest.json");
  CHECK(back.outputs.size() == 1);
  CHECK(back.runs.front().mse_after == 0.01);
  CHECK(back.to_json()["runs"][0]["improvement_db"].get<double>() == doctest::Approx(10.0));
  CHECK(verify_manifest(dir / "run.manifest.json").ok());
  write_text(dir / "data.csv", "x\r\n2\r\n");
  CHECK_FALSE(verify_manifest(dir / "run.manifest.json").ok());
  fs::remove(dir / "data.csv");
  CHECK(verify_manifest(dir / "run.manifest.json").problems.front().find("missing") != std::string::npos);
}

TEST_CASE("cli usage errors exit 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"run", "--no-such-flag"}).code == 2);
  CHECK(cli({"run", "--waveform", "sawtooth"}).code == 2);
  CHECK(cli({"run", "--config", "/nonexistent/cfg.json"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--version"}).out.find(version()) != std::string::npos);
}

TEST_CASE("cli runtime errors exit 1 with one line") {
  const auto dir = scratch("cli_err");
  write_text(dir / "bad.json", R"({"waveform": {"type": "lfm", "f_start": 3e9, "f_stop": 2e9}})");
  const auto r = cli({"config", "--config", (dir / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("waveform.f_stop") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  const auto sign = cli({"run", "--sign", "1", "--out", (dir / "o").string()});
  CHECK(sign.code == 1);
  CHECK(std::count(sign.err.begin(), sign.err.end(), '\n') == 1);
}

TEST_CASE("cli config echo") {
  const auto r = cli({"config", "--waveform", "fh", "--seed", "4", "--sign", "-1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["waveform"]["type"] == "fh");
  CHECK(j["chain"]["seed"] == 4);
}

TEST_CASE("cli run writes verified, reproducible outputs") {
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  REQUIRE(cli({"run", "--waveform", "lfm", "--snr", "8", "--seed", "1", "--out", a.string()}).code == 0);
  REQUIRE(cli({"run", "--waveform", "lfm", "--snr", "8", "--seed", "1", "--out", b.string()}).code == 0);
  const auto m = read_manifest(a / "run.manifest.json");
  REQUIRE(m.runs.size() == 1);
  CHECK(m.runs[0].mse_after < m.runs[0].mse_before);
  CHECK(m.runs[0].seed == 1);
  CHECK(*m.runs[0].snr_db == 8.0);
  CHECK(m.tool_version == version());
  const auto mb = read_manifest(b / "run.manifest.json");
  REQUIRE(m.outputs.size() == mb.outputs.size());
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    CHECK(m.outputs[i].path == mb.outputs[i].path);
    CHECK(m.outputs[i].sha256 == mb.outputs[i].sha256);
  }
  for (const char* f : {"input.f64", "reference.f64", "filtered.f64", "spectrogram_before.csv", "spectrogram_after.csv"}) {
    CHECK(fs::exists(a / f));
  }
  const auto sg = read_csv(a / "spectrogram_after.csv");
  CHECK(sg.front().front() == "time_s");
  CHECK(sg.size() == 1 + (256000 - 512) / 256 + 1);
  CHECK(cli({"verify", a.string()}).code == 0);
  write_text(a / "filtered.f64", "tampered");
  CHECK(cli({"verify", (a / "run.manifest.json").string()}).code == 1);
}

TEST_CASE("cli gen honours the output directory variable") {
  const auto dir = scratch("gen_env");
  ::setenv(kOutDirEnv, dir.string().c_str(), 1);
  const auto r = cli({"gen", "--waveform", "bpsk", "--snr", "none"});
  ::unsetenv(kOutDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "signal.f64"));
  CHECK(fs::exists(dir / "control.f64"));
  CHECK_FALSE(fs::exists(dir / "noisy.f64"));
  CHECK(read_signal(dir / "control.f64").size() == 256000);
  CHECK(verify_manifest(dir / "gen.manifest.json").ok());
}

TEST_CASE("cli demod reports bit recovery") {
  const auto dir = scratch("demod");
  const auto r = cli({"demod", "--snr", "8", "--seed", "2", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("correct_after=400") != std::string::npos);
  CHECK(read_csv(dir / "demod.csv").size() == 401);
  CHECK(cli({"demod", "--waveform", "lfm", "--out", dir.string()}).code == 1);
}

TEST_CASE("cli response maps control tones to passband peaks") {
  const auto dir = scratch("response");
  const auto r = cli({"response", "--ctrl", "11.8e9,12.5e9,13.9e9,15.3e9", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "passbands.csv");
  REQUIRE(rows.size() == 5);
  const double expect[] = {1.0e9, 1.7e9, 3.1e9, 4.5e9};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(std::stod(rows[i + 1][2]) - expect[i]) <= 1e6);
    CHECK(std::stod(rows[i + 1][4]) == doctest::Approx(22.5e6).epsilon(0.1));
  }
  CHECK(verify_manifest(dir / "response.manifest.json").ok());
}

TEST_CASE("cli sweep over the full SNR range") {
  const auto dir = scratch("sweep");
  const auto r = cli({"sweep", "--snr", "-12:0.5:15.5", "--waveform", "fh", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "sweep.csv");
  CHECK(rows.size() == 1 + 56);
  CHECK(rows.front() == std::vector<std::string>{"snr_db", "mse_before", "mse_after", "improvement_db", "seeds"});
  CHECK(rows[1][0] == "-12");
  CHECK(rows.back()[0] == "15.5");
  CHECK(read_manifest(dir / "sweep.manifest.json").runs.size() == 56);
}
