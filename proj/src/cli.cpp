#include "tvmpf/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "tvmpf/config.hpp"
#include "tvmpf/manifest.hpp"
#include "tvmpf/metrics.hpp"
#include "tvmpf/pipeline.hpp"
#include "tvmpf/signal_io.hpp"

#ifndef TVMPF_VERSION
#define TVMPF_VERSION "0.0.0"
#endif

namespace tvmpf {

namespace fs = std::filesystem;

std::string version() { return TVMPF_VERSION; }

namespace {

struct Options {
  std::string config;
  std::string waveform;
  std::string snr;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::string ctrl;
  std::optional<int> sign;
  std::string out;
  unsigned threads = 0;
  std::string verify_target;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::optional<double> parse_snr_value(const std::string& text) {
  if (text == "none" || text == "inf") return std::nullopt;
  const auto v = parse_list_or_range(text);
  if (v.size() != 1) throw ConfigError("--snr", "expected a single value or 'none' for this command");
  return v.front();
}

ResolvedConfig resolve(const Options& opt, ExperimentKind kind) {
  ResolvedConfig cfg = opt.config.empty() ? parse_config_json(nlohmann::json::object()) : parse_config(opt.config);
  cfg.experiment.kind = kind;
  std::string waveform = opt.waveform;
  if (waveform.empty() && opt.config.empty() && kind == ExperimentKind::kDemod) waveform = "bpsk";
  if (!waveform.empty() && waveform != cfg.waveform.kind()) {
    cfg.waveform = default_waveform(waveform);
  }
  if (!opt.snr.empty()) {
    if (kind == ExperimentKind::kSweep) {
      try {
        cfg.experiment.snr_list = parse_list_or_range(opt.snr);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError("--snr", e.what());
      }
    } else {
      try {
        cfg.experiment.snr_db = parse_snr_value(opt.snr);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError("--snr", e.what());
      }
    }
  }
  if (opt.seed) cfg.chain.seed = *opt.seed;
  if (opt.seeds) cfg.experiment.seeds_per_point = *opt.seeds;
  if (!opt.ctrl.empty()) {
    try {
      cfg.experiment.control_tones = parse_list_or_range(opt.ctrl);
    } catch (const Error& e) {
      throw ConfigError("--ctrl", e.what());
    }
  }
  if (opt.sign) cfg.chain.sideband_sign = *opt.sign;
  validate_config(cfg);
  return cfg;
}

fs::path out_dir(const Options& opt) {
  if (!opt.out.empty()) return opt.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kDefaultOutDir;
}

RunManifest start_manifest(const std::string& command, const ResolvedConfig& cfg) {
  RunManifest m;
  m.command = command;
  m.config = to_json(cfg);
  m.tool_version = version();
  m.seeds = {cfg.chain.seed};
  return m;
}

std::string manifest_name(const std::string& command) { return command + ".manifest.json"; }

void finish(RunManifest& m, const fs::path& dir, const Stopwatch& clock) {
  m.wall_clock_s = clock.seconds();
  write_manifest(m, dir / manifest_name(m.command));
  std::cout << "wrote " << (dir / manifest_name(m.command)).string() << "\n";
}

void write_output(RunManifest& m, const fs::path& dir, const std::string& name, const std::string& bytes) {
  write_file_atomic(dir / name, bytes);
  m.add_output(dir, name);
}

void write_signal_output(RunManifest& m, const fs::path& dir, const std::string& name, const SampledSignal& s) {
  write_signal(s, dir / name);
  m.add_output(dir, name);
  m.add_output(dir, sidecar_path(name).string());
}

std::string spectrogram_csv(const Spectrogram& sg) {
  std::vector<std::string> header{"time_s"};
  for (double f : sg.bin_freqs) header.push_back(format_number(f));
  CsvWriter csv(header);
  for (std::size_t t = 0; t < sg.frames(); ++t) {
    csv.cell(sg.frame_times[t]);
    for (double p : sg.power_db[t]) csv.cell(p);
    csv.end_row();
  }
  return csv.str();
}

std::string snr_label(std::optional<double> snr) { return snr ? format_number(*snr) + " dB" : "none"; }

ManifestRun manifest_run(const RunArtifacts& a) {
  ManifestRun r;
  r.waveform = a.metadata.waveform;
  r.seed = a.metadata.seed;
  r.snr_db = a.metadata.snr_db;
  r.measured_snr_db = a.metadata.measured_snr_db;
  r.mse_before = a.mse_before;
  r.mse_after = a.mse_after;
  return r;
}

int cmd_gen(const Options& opt) {
  Stopwatch clock;
  const auto cfg = resolve(opt, ExperimentKind::kGen);
  const auto dir = out_dir(opt);
  Experiment ex(cfg.waveform, cfg.chain);
  auto m = start_manifest("gen", cfg);
  write_signal_output(m, dir, "signal.f64", ex.signal());
  write_signal_output(m, dir, "control.f64", ex.control());
  if (cfg.experiment.snr_db) {
    write_signal_output(m, dir, "noisy.f64", ex.noisy_drive(cfg.experiment.snr_db, cfg.chain.seed));
  }
  std::cout << cfg.waveform.kind() << ": " << ex.signal().size() << " samples at "
            << format_number(cfg.chain.sample_rate) << " S/s\n";
  finish(m, dir, clock);
  return 0;
}

int cmd_run(const Options& opt) {
  Stopwatch clock;
  const auto cfg = resolve(opt, ExperimentKind::kRun);
  const auto dir = out_dir(opt);
  Experiment ex(cfg.waveform, cfg.chain);
  const auto a = ex.run(cfg.experiment.snr_db, cfg.chain.seed);
  auto m = start_manifest("run", cfg);
  m.runs.push_back(manifest_run(a));
  write_signal_output(m, dir, "input.f64", a.noisy_input);
  write_signal_output(m, dir, "reference.f64", a.reference);
  write_signal_output(m, dir, "filtered.f64", a.filtered);
  const auto& so = cfg.experiment.spectrogram;
  write_output(m, dir, "spectrogram_before.csv",
               spectrogram_csv(spectrogram(a.noisy_input, so.window_len, so.hop, so.display)));
  write_output(m, dir, "spectrogram_after.csv",
               spectrogram_csv(spectrogram(a.filtered, so.window_len, so.hop, so.display)));
  std::cout << a.metadata.waveform << " snr=" << snr_label(a.snr_target) << " seed=" << a.metadata.seed
            << " mse_before=" << format_number(a.mse_before) << " mse_after=" << format_number(a.mse_after);
  if (a.mse_before > 0.0) std::cout << " improvement_db=" << format_number(mse_improvement(a));
  std::cout << "\n";
  finish(m, dir, clock);
  return 0;
}

int cmd_sweep(const Options& opt) {
  Stopwatch clock;
  const auto cfg = resolve(opt, ExperimentKind::kSweep);
  const auto dir = out_dir(opt);
  const auto rows = run_sweep(cfg.waveform, cfg.experiment.snr_list, cfg.chain,
                              cfg.experiment.seeds_per_point, opt.threads);
  auto m = start_manifest("sweep", cfg);
  m.seeds.clear();
  for (std::size_t s = 0; s < cfg.experiment.seeds_per_point; ++s) m.seeds.push_back(cfg.chain.seed + s);
  CsvWriter csv({"snr_db", "mse_before", "mse_after", "improvement_db", "seeds"});
  for (const auto& r : rows) {
    csv.cell(r.snr_db).cell(r.mse_before).cell(r.mse_after);
    csv.cell(r.mse_before > 0.0 ? mse_improvement(r.mse_before, r.mse_after) : 0.0);
    csv.cell(r.seeds).end_row();
    ManifestRun mr;
    mr.waveform = cfg.waveform.kind();
    mr.seed = cfg.chain.seed;
    mr.seeds = r.seeds;
    mr.snr_db = r.snr_db;
    mr.measured_snr_db = r.snr_db;
    mr.mse_before = r.mse_before;
    mr.mse_after = r.mse_after;
    m.runs.push_back(mr);
  }
  write_output(m, dir, "sweep.csv", csv.str());
  std::cout << cfg.waveform.kind() << ": " << rows.size() << " SNR points x "
            << cfg.experiment.seeds_per_point << " seeds\n";
  finish(m, dir, clock);
  return 0;
}

int cmd_response(const Options& opt) {
  Stopwatch clock;
  const auto cfg = resolve(opt, ExperimentKind::kResponse);
  const auto dir = out_dir(opt);
  auto m = start_manifest("response", cfg);
  CsvWriter summary({"f_ctrl_hz", "expected_center_hz", "peak_freq_hz", "peak_db", "bw3db_hz"});
  CsvWriter curves({"f_ctrl_hz", "freq_hz", "response_db"});
  for (double f_ctrl : cfg.experiment.control_tones) {
    const auto pb = scan_passband(f_ctrl, cfg.chain, cfg.experiment.scan);
    summary.cell(pb.f_ctrl).cell(pb.expected_center).cell(pb.peak_freq).cell(pb.peak_db).cell(pb.bw3db);
    summary.end_row();
    for (const auto& p : pb.curve) curves.cell(pb.f_ctrl).cell(p.freq).cell(p.response_db).end_row();
    std::cout << "f_ctrl=" << format_number(f_ctrl) << " peak=" << format_number(pb.peak_freq)
              << " bw3db=" << format_number(pb.bw3db) << "\n";
  }
  write_output(m, dir, "passbands.csv", summary.str());
  write_output(m, dir, "response.csv", curves.str());
  finish(m, dir, clock);
  return 0;
}

int cmd_demod(const Options& opt) {
  Stopwatch clock;
  const auto cfg = resolve(opt, ExperimentKind::kDemod);
  const auto dir = out_dir(opt);
  const auto& pc = std::get<PhaseCoded>(cfg.waveform.shape);
  Experiment ex(cfg.waveform, cfg.chain);
  const auto a = ex.run(cfg.experiment.snr_db, cfg.chain.seed);

  const auto one = pc.code.empty() ? phase_code(pc, cfg.chain.waveform_seed) : pc.code;
  const auto periods = static_cast<std::size_t>(std::llround(cfg.chain.duration / pc.period));
  std::vector<std::uint8_t> code;
  for (std::size_t p = 0; p < periods; ++p) code.insert(code.end(), one.begin(), one.end());
  const double bit = pc.period / static_cast<double>(pc.n_bits);
  const auto before = recover_bpsk_phase(a.noisy_input, pc.carrier, bit);
  const auto after = recover_bpsk_phase(a.filtered, pc.carrier, bit);
  const auto err_before = count_bit_errors(before.bits, code);
  const auto err_after = count_bit_errors(after.bits, code);

  auto m = start_manifest("demod", cfg);
  m.runs.push_back(manifest_run(a));
  CsvWriter csv({"bit", "code", "phase_before", "decision_before", "phase_after", "decision_after"});
  for (std::size_t k = 0; k < code.size(); ++k) {
    csv.cell(k).cell(static_cast<int>(code[k] != code[0]));
    csv.cell(before.phases[k]).cell(static_cast<int>(before.bits[k]));
    csv.cell(after.phases[k]).cell(static_cast<int>(after.bits[k]));
    csv.end_row();
  }
  write_output(m, dir, "demod.csv", csv.str());
  std::cout << "bpsk snr=" << snr_label(a.snr_target) << " seed=" << cfg.chain.seed << " bits=" << code.size()
            << " correct_before=" << code.size() - err_before << " correct_after=" << code.size() - err_after
            << "\n";
  finish(m, dir, clock);
  return 0;
}

int cmd_verify(const Options& opt) {
  fs::path target = opt.verify_target.empty() ? out_dir(opt) : fs::path(opt.verify_target);
  std::vector<fs::path> manifests;
  if (fs::is_directory(target)) {
    for (const auto& e : fs::directory_iterator(target)) {
      const auto name = e.path().filename().string();
      if (name.size() > 14 && name.ends_with(".manifest.json")) manifests.push_back(e.path());
    }
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) throw Error("no manifests found in " + target.string());
  } else {
    manifests.push_back(target);
  }
  bool ok = true;
  for (const auto& path : manifests) {
    const auto report = verify_manifest(path);
    for (const auto& p : report.problems) std::cout << path.string() << ": " << p << "\n";
    std::cout << path.string() << ": " << (report.ok() ? "OK" : "FAILED") << " (" << report.checked
              << " files)\n";
    ok = ok && report.ok();
  }
  if (!ok) throw Error("checksum verification failed");
  return 0;
}

int cmd_config(const Options& opt) {
  const auto cfg = resolve(opt, ExperimentKind::kRun);
  std::cout << to_json(cfg).dump(2) << "\n";
  return 0;
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Time-varying microwave photonic filter simulator", "tvmpf"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--waveform", opt.waveform, "Waveform family")
        ->check(CLI::IsMember({"lfm", "nlfm", "dlfm", "fh", "bpsk"}));
    sub->add_option("--seed", opt.seed, "Noise seed");
    sub->add_option("--sign", opt.sign, "Sideband sign (+1 or -1)")->check(CLI::IsMember({-1, 1}));
    sub->add_option("--out", opt.out, std::string("Output directory (default $") + kOutDirEnv + " or " +
                                          kDefaultOutDir + ")");
  };

  auto* gen = app.add_subcommand("gen", "Synthesize signal and control and write them");
  common(gen);
  gen->add_option("--snr", opt.snr, "Also write a noisy copy at this in-band SNR (dB)");

  auto* run = app.add_subcommand("run", "One experiment: waveforms, spectrograms, MSEs");
  common(run);
  run->add_option("--snr", opt.snr, "In-band SNR in dB, or 'none'");

  auto* sweep = app.add_subcommand("sweep", "MSE before/after over an SNR list");
  common(sweep);
  sweep->add_option("--snr", opt.snr, "SNR list 'a,b,c' or range 'start:step:stop' (dB)");
  sweep->add_option("--seeds", opt.seeds, "Seeds per SNR point")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");

  auto* response = app.add_subcommand("response", "Passband scan for a set of control tones");
  common(response);
  response->add_option("--ctrl", opt.ctrl, "Control tones in Hz, list or range");

  auto* demod = app.add_subcommand("demod", "BPSK phase recovery before and after filtering");
  common(demod);
  demod->add_option("--snr", opt.snr, "In-band SNR in dB, or 'none'");

  auto* verify = app.add_subcommand("verify", "Recompute the checksums recorded in manifests");
  verify->add_option("target", opt.verify_target, "Manifest file or output directory");
  verify->add_option("--out", opt.out, "Output directory");

  auto* config = app.add_subcommand("config", "Print the fully resolved configuration");
  common(config);
  config->add_option("--snr", opt.snr, "In-band SNR in dB, or 'none'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return cmd_gen(opt);
    if (*run) return cmd_run(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*response) return cmd_response(opt);
    if (*demod) return cmd_demod(opt);
    if (*verify) return cmd_verify(opt);
    if (*config) return cmd_config(opt);
  } catch (const std::exception& e) {
    std::cerr << "tvmpf: error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tvmpf
