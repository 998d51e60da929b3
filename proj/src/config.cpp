#include "tvmpf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tvmpf {

using nlohmann::json;

namespace {

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

// Strict reader for one JSON object: typed getters with defaults, and an
// error for every key that was never asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  void mark(const std::string& key) { seen_.insert(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(join(where_, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(join(where_, key), "must be finite");
    return d;
  }

  std::optional<double> nullable_number(const std::string& key, std::optional<double> fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (j_.at(key).is_null()) return std::nullopt;
    return number(key, 0.0);
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
      throw ConfigError(join(where_, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  int integer(const std::string& key, int fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(where_, key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(join(where_, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (v.is_string()) {
      try {
        return parse_list_or_range(v.get<std::string>());
      } catch (const Error& e) {
        throw ConfigError(join(where_, key), e.what());
      }
    }
    if (!v.is_array()) throw ConfigError(join(where_, key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(join(where_, key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::string path(const std::string& key) const { return join(where_, key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(where_, it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void require_positive(const ObjectReader& r, const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(r.path(key), "must be > 0");
}

void require_increasing(const ObjectReader& r, const std::string& lo_key, double lo,
                        const std::string& hi_key, double hi) {
  if (!(hi > lo)) {
    std::ostringstream os;
    os << r.path(hi_key) << " (" << hi << ") must be greater than " << r.path(lo_key) << " (" << lo
       << ")";
    throw ConfigError(r.path(hi_key), os.str());
  }
}

Band band_from_json(const json& j, const std::string& where, Band fallback) {
  ObjectReader r(j, where);
  Band b{r.number("low", fallback.low), r.number("high", fallback.high)};
  r.finish();
  require_increasing(r, "low", b.low, "high", b.high);
  return b;
}

json band_to_json(const Band& b) { return {{"low", b.low}, {"high", b.high}}; }

std::string profile_name(NlfmProfile p) {
  return p == NlfmProfile::kQuadratic ? "quadratic" : "sinusoidal";
}

std::string phase_mode_name(FhPhaseMode m) {
  return m == FhPhaseMode::kContinuousPerTone ? "continuous" : "reset";
}

}  // namespace

WaveformSpec default_waveform(std::string_view kind) {
  WaveformSpec spec;
  if (kind == "lfm") {
    spec.shape = Lfm{};
  } else if (kind == "nlfm") {
    spec.shape = Nlfm{};
  } else if (kind == "dlfm") {
    spec.shape = Dlfm{};
  } else if (kind == "fh") {
    spec.shape = Fh{};
  } else if (kind == "bpsk" || kind == "phase_coded") {
    spec.shape = PhaseCoded{};
  } else {
    throw ConfigError("waveform.type", "unknown waveform type '" + std::string(kind) +
                                           "' (expected lfm, nlfm, dlfm, fh or bpsk)");
  }
  return spec;
}

WaveformSpec waveform_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const std::string type = r.string("type", "lfm");
  WaveformSpec spec;
  try {
    spec = default_waveform(type);
  } catch (const ConfigError&) {
    throw ConfigError(r.path("type"), "unknown waveform type '" + type + "'");
  }
  spec.amplitude = r.number("amplitude", 1.0);
  require_positive(r, "amplitude", spec.amplitude);

  if (auto* p = std::get_if<Lfm>(&spec.shape)) {
    p->f_start = r.number("f_start", p->f_start);
    p->f_stop = r.number("f_stop", p->f_stop);
    p->period = r.number("period", p->period);
    require_positive(r, "f_start", p->f_start);
    require_increasing(r, "f_start", p->f_start, "f_stop", p->f_stop);
    require_positive(r, "period", p->period);
  } else if (auto* p = std::get_if<Nlfm>(&spec.shape)) {
    p->f_start = r.number("f_start", p->f_start);
    p->f_stop = r.number("f_stop", p->f_stop);
    p->period = r.number("period", p->period);
    const std::string profile = r.string("profile", profile_name(p->profile));
    if (profile == "quadratic") {
      p->profile = NlfmProfile::kQuadratic;
    } else if (profile == "sinusoidal") {
      p->profile = NlfmProfile::kSinusoidal;
    } else {
      throw ConfigError(r.path("profile"), "expected 'quadratic' or 'sinusoidal'");
    }
    require_positive(r, "f_start", p->f_start);
    require_increasing(r, "f_start", p->f_start, "f_stop", p->f_stop);
    require_positive(r, "period", p->period);
  } else if (auto* p = std::get_if<Dlfm>(&spec.shape)) {
    const double lo = r.number("f_low", p->up.f_start);
    const double hi = r.number("f_high", p->up.f_stop);
    const double period = r.number("period", p->up.period);
    require_positive(r, "f_low", lo);
    require_increasing(r, "f_low", lo, "f_high", hi);
    require_positive(r, "period", period);
    p->up = Lfm{lo, hi, period};
    p->down = Lfm{hi, lo, period};
  } else if (auto* p = std::get_if<Fh>(&spec.shape)) {
    p->freqs = r.numbers("freqs", p->freqs);
    p->dwell = r.number("dwell", p->dwell);
    const std::string mode = r.string("phase_mode", phase_mode_name(p->phase_mode));
    if (mode == "continuous") {
      p->phase_mode = FhPhaseMode::kContinuousPerTone;
    } else if (mode == "reset") {
      p->phase_mode = FhPhaseMode::kReset;
    } else {
      throw ConfigError(r.path("phase_mode"), "expected 'continuous' or 'reset'");
    }
    if (p->freqs.empty()) throw ConfigError(r.path("freqs"), "frequency list is empty");
    for (double f : p->freqs) {
      if (!(f > 0.0)) throw ConfigError(r.path("freqs"), "all frequencies must be > 0");
    }
    require_positive(r, "dwell", p->dwell);
  } else if (auto* p = std::get_if<PhaseCoded>(&spec.shape)) {
    p->carrier = r.number("carrier", p->carrier);
    p->n_bits = r.unsigned_int("n_bits", p->n_bits);
    p->period = r.number("period", p->period);
    if (r.has("code")) {
      const auto& code = r.raw("code");
      if (!code.is_array()) throw ConfigError(r.path("code"), "expected an array of 0/1");
      p->code.clear();
      for (const auto& b : code) {
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
          throw ConfigError(r.path("code"), "expected an array of 0/1");
        }
        p->code.push_back(static_cast<std::uint8_t>(b.get<int>()));
      }
      if (p->code.size() != p->n_bits) {
        throw ConfigError(r.path("code"), "length must equal n_bits");
      }
    } else {
      r.mark("code");
    }
    require_positive(r, "carrier", p->carrier);
    if (p->n_bits == 0) throw ConfigError(r.path("n_bits"), "must be > 0");
    require_positive(r, "period", p->period);
  }
  r.finish();
  return spec;
}

json waveform_to_json(const WaveformSpec& spec) {
  json j;
  j["type"] = spec.kind();
  j["amplitude"] = spec.amplitude;
  if (auto* p = std::get_if<Lfm>(&spec.shape)) {
    j["f_start"] = p->f_start;
    j["f_stop"] = p->f_stop;
    j["period"] = p->period;
  } else if (auto* p = std::get_if<Nlfm>(&spec.shape)) {
    j["f_start"] = p->f_start;
    j["f_stop"] = p->f_stop;
    j["period"] = p->period;
    j["profile"] = profile_name(p->profile);
  } else if (auto* p = std::get_if<Dlfm>(&spec.shape)) {
    j["f_low"] = std::min(p->up.f_start, p->up.f_stop);
    j["f_high"] = std::max(p->up.f_start, p->up.f_stop);
    j["period"] = p->up.period;
  } else if (auto* p = std::get_if<Fh>(&spec.shape)) {
    j["freqs"] = p->freqs;
    j["dwell"] = p->dwell;
    j["phase_mode"] = phase_mode_name(p->phase_mode);
  } else if (auto* p = std::get_if<PhaseCoded>(&spec.shape)) {
    j["carrier"] = p->carrier;
    j["n_bits"] = p->n_bits;
    j["period"] = p->period;
    if (p->code.empty()) {
      j["code"] = nullptr;
    } else {
      j["code"] = json::array();
      for (auto b : p->code) j["code"].push_back(static_cast<int>(b));
    }
  }
  return j;
}

ChainConfig chain_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  ChainConfig c;
  c.sample_rate = r.number("sample_rate", c.sample_rate);
  c.duration = r.number("duration", c.duration);
  c.sideband_sign = r.integer("sideband_sign", c.sideband_sign);
  c.pump_offset = r.number("pump_offset", c.pump_offset);
  c.control_skew = r.number("control_skew", c.control_skew);
  c.seed = r.unsigned_int("seed", c.seed);
  c.waveform_seed = r.unsigned_int("waveform_seed", c.waveform_seed);
  require_positive(r, "sample_rate", c.sample_rate);
  require_positive(r, "duration", c.duration);
  if (c.sideband_sign != 1 && c.sideband_sign != -1) {
    throw ConfigError(r.path("sideband_sign"), "must be +1 or -1");
  }

  if (r.has("mzm")) {
    ObjectReader m(r.raw("mzm"), r.path("mzm"));
    c.mzm.mod_index = m.number("mod_index", c.mzm.mod_index);
    m.finish();
  }
  if (r.has("pm")) {
    ObjectReader m(r.raw("pm"), r.path("pm"));
    c.pm.mod_index = m.number("mod_index", c.pm.mod_index);
    m.finish();
  }
  if (r.has("obpf")) {
    const auto& o = r.raw("obpf");
    if (o.is_string()) {
      if (o.get<std::string>() != "auto") throw ConfigError(r.path("obpf"), "expected \"auto\" or an object");
    } else {
      ObjectReader m(o, r.path("obpf"));
      bool automatic = false;
      if (m.has("auto")) {
        const auto& a = m.raw("auto");
        if (!a.is_boolean()) throw ConfigError(m.path("auto"), "expected a boolean");
        automatic = a.get<bool>();
      }
      ObpfSpec spec;
      spec.low = m.number("low", spec.low);
      spec.high = m.number("high", spec.high);
      spec.edge_width = m.number("edge_width", spec.edge_width);
      m.finish();
      if (!automatic) {
        require_increasing(m, "low", spec.low, "high", spec.high);
        c.obpf = spec;
      }
    }
  } else {
    r.mark("obpf");
  }
  if (r.has("sbs")) {
    ObjectReader m(r.raw("sbs"), r.path("sbs"));
    c.sbs.bfs = m.number("bfs", c.sbs.bfs);
    c.sbs.target_bw3db = m.number("target_bw3db", c.sbs.target_bw3db);
    c.sbs.peak_gain_db = m.number("peak_gain_db", c.sbs.peak_gain_db);
    m.number("intrinsic_linewidth", 0.0);  // derived; accepted in echoed configs and recomputed
    m.finish();
    require_positive(m, "bfs", c.sbs.bfs);
    require_positive(m, "target_bw3db", c.sbs.target_bw3db);
    require_positive(m, "peak_gain_db", c.sbs.peak_gain_db);
  }
  if (r.has("bpf")) {
    ObjectReader m(r.raw("bpf"), r.path("bpf"));
    c.bpf.band.low = m.number("low", c.bpf.band.low);
    c.bpf.band.high = m.number("high", c.bpf.band.high);
    c.bpf.edge_width = m.number("edge_width", c.bpf.edge_width);
    m.finish();
    require_increasing(m, "low", c.bpf.band.low, "high", c.bpf.band.high);
  }
  if (r.has("noise_band")) c.noise_band = band_from_json(r.raw("noise_band"), r.path("noise_band"), c.noise_band);
  r.finish();
  return c;
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kGen: return "gen";
    case ExperimentKind::kRun: return "run";
    case ExperimentKind::kSweep: return "sweep";
    case ExperimentKind::kResponse: return "response";
    case ExperimentKind::kDemod: return "demod";
  }
  return "run";
}

ExperimentKind experiment_kind_from_string(std::string_view s) {
  for (auto k : {ExperimentKind::kGen, ExperimentKind::kRun, ExperimentKind::kSweep,
                 ExperimentKind::kResponse, ExperimentKind::kDemod}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("experiment.kind", "unknown experiment kind '" + std::string(s) + "'");
}

std::vector<double> parse_list_or_range(std::string_view text) {
  auto parse_one = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw Error("cannot parse number '" + std::string(s) + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto pos = text.find(':', start);
      parts.push_back(parse_one(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (parts.size() != 3) throw Error("range must look like start:step:stop");
    const double a = parts[0];
    const double step = parts[1];
    const double b = parts[2];
    if (!(step > 0.0) || b < a) throw Error("range needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    out.push_back(parse_one(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> default_snr_list() { return parse_list_or_range("-12:0.5:15.5"); }

std::vector<double> default_control_tones() { return parse_list_or_range("11.8e9:0.5e9:15.3e9"); }

void validate_config(const ResolvedConfig& cfg) {
  const auto& ch = cfg.chain;
  try {
    ch.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("chain", e.what());
  }
  const double nyq = ch.sample_rate / 2.0;
  auto nyquist = [&](const char* field, double f) {
    if (!(ch.sample_rate >= 2.5 * f)) {
      std::ostringstream os;
      os << "highest frequency " << f << " Hz needs sample_rate >= " << 2.5 * f
         << " (chain.sample_rate is " << ch.sample_rate << ", Nyquist " << nyq << ")";
      throw ConfigError(field, os.str());
    }
  };
  try {
    cfg.waveform.validate();
  } catch (const Error& e) {
    throw ConfigError("waveform", e.what());
  }
  nyquist("waveform", cfg.waveform.frequency_range().second);

  const double periods = ch.duration / cfg.waveform.period();
  if (std::round(periods) < 1.0 || std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods)) {
    std::ostringstream os;
    os << "duration " << ch.duration << " s is not an integer number of waveform periods ("
       << cfg.waveform.period() << " s)";
    throw ConfigError("chain.duration", os.str());
  }
  if (const auto* pc = std::get_if<PhaseCoded>(&cfg.waveform.shape)) {
    const double spb = pc->period * ch.sample_rate / static_cast<double>(pc->n_bits);
    if (std::abs(spb - std::round(spb)) > 1e-6 * spb || std::round(spb) < 1.0) {
      std::ostringstream os;
      os << pc->n_bits << " bits do not divide the " << pc->period * ch.sample_rate
         << " samples of one period at chain.sample_rate";
      throw ConfigError("waveform.n_bits", os.str());
    }
  }

  if (cfg.experiment.kind == ExperimentKind::kResponse) {
    if (cfg.experiment.control_tones.empty()) {
      throw ConfigError("experiment.control_tones", "list is empty");
    }
    for (double f : cfg.experiment.control_tones) {
      if (!(f > 0.0)) throw ConfigError("experiment.control_tones", "tones must be > 0");
      nyquist("experiment.control_tones", f);
    }
    if (cfg.experiment.scan.coarse_high >= nyq) {
      throw ConfigError("experiment.scan.coarse_high", "probe range extends beyond Nyquist");
    }
  } else {
    WaveformSpec control;
    try {
      control = derive_control(cfg.waveform, ch.sbs.bfs, ch.sideband_sign);
    } catch (const Error& e) {
      throw ConfigError("chain.sideband_sign", e.what());
    }
    nyquist("waveform (control signal)", control.frequency_range().second);
    try {
      resolve_obpf(ch, control);
    } catch (const Error& e) {
      throw ConfigError("chain.obpf", e.what());
    }
  }
  if (cfg.experiment.kind == ExperimentKind::kSweep) {
    if (cfg.experiment.snr_list.empty()) throw ConfigError("experiment.snr_list", "list is empty");
    if (cfg.experiment.seeds_per_point == 0) throw ConfigError("experiment.seeds_per_point", "must be >= 1");
  }
  if (cfg.experiment.kind == ExperimentKind::kDemod && !std::holds_alternative<PhaseCoded>(cfg.waveform.shape)) {
    throw ConfigError("waveform.type", "demod requires a bpsk waveform");
  }
  const auto& sg = cfg.experiment.spectrogram;
  const auto n = static_cast<std::size_t>(std::llround(ch.duration * ch.sample_rate));
  if (sg.window_len < 2 || sg.window_len > n) {
    throw ConfigError("experiment.spectrogram.window_len", "must lie in [2, record length]");
  }
  if (sg.hop == 0) throw ConfigError("experiment.spectrogram.hop", "must be >= 1");
}

ResolvedConfig parse_config_json(const json& doc) {
  ObjectReader r(doc, "");
  ResolvedConfig cfg;
  if (r.has("waveform")) {
    cfg.waveform = waveform_from_json(r.raw("waveform"), "waveform");
  } else {
    r.mark("waveform");
  }
  if (r.has("chain")) {
    cfg.chain = chain_from_json(r.raw("chain"), "chain");
  } else {
    r.mark("chain");
  }
  auto& ex = cfg.experiment;
  ex.snr_list = default_snr_list();
  ex.control_tones = default_control_tones();
  if (r.has("experiment")) {
    ObjectReader e(r.raw("experiment"), "experiment");
    ex.kind = experiment_kind_from_string(e.string("kind", std::string(to_string(ex.kind))));
    ex.snr_db = e.nullable_number("snr_db", ex.snr_db);
    ex.snr_list = e.numbers("snr_list", ex.snr_list);
    ex.seeds_per_point = e.unsigned_int("seeds_per_point", ex.seeds_per_point);
    ex.control_tones = e.numbers("control_tones", ex.control_tones);
    if (e.has("scan")) {
      ObjectReader s(e.raw("scan"), e.path("scan"));
      ex.scan.coarse_low = s.number("coarse_low", ex.scan.coarse_low);
      ex.scan.coarse_high = s.number("coarse_high", ex.scan.coarse_high);
      ex.scan.coarse_step = s.number("coarse_step", ex.scan.coarse_step);
      ex.scan.fine_half_span = s.number("fine_half_span", ex.scan.fine_half_span);
      ex.scan.fine_step = s.number("fine_step", ex.scan.fine_step);
      s.finish();
      require_positive(s, "coarse_low", ex.scan.coarse_low);
      require_increasing(s, "coarse_low", ex.scan.coarse_low, "coarse_high", ex.scan.coarse_high);
      require_positive(s, "coarse_step", ex.scan.coarse_step);
      require_positive(s, "fine_half_span", ex.scan.fine_half_span);
      require_positive(s, "fine_step", ex.scan.fine_step);
    }
    if (e.has("spectrogram")) {
      ObjectReader s(e.raw("spectrogram"), e.path("spectrogram"));
      ex.spectrogram.window_len = s.unsigned_int("window_len", ex.spectrogram.window_len);
      ex.spectrogram.hop = s.unsigned_int("hop", ex.spectrogram.hop);
      if (s.has("display")) {
        ex.spectrogram.display = band_from_json(s.raw("display"), s.path("display"), ex.spectrogram.display);
      }
      s.finish();
    }
    e.finish();
  } else {
    r.mark("experiment");
  }
  r.finish();
  validate_config(cfg);
  return cfg;
}

ResolvedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON in ") + path.string() + ": " + e.what());
  }
  return parse_config_json(doc);
}

json to_json(const ResolvedConfig& cfg) {
  const auto& c = cfg.chain;
  json chain;
  chain["sample_rate"] = c.sample_rate;
  chain["duration"] = c.duration;
  chain["sideband_sign"] = c.sideband_sign;
  chain["pump_offset"] = c.pump_offset;
  chain["control_skew"] = c.control_skew;
  chain["seed"] = c.seed;
  chain["waveform_seed"] = c.waveform_seed;
  chain["mzm"] = {{"mod_index", c.mzm.mod_index}};
  chain["pm"] = {{"mod_index", c.pm.mod_index}};
  if (c.obpf) {
    chain["obpf"] = {{"low", c.obpf->low}, {"high", c.obpf->high}, {"edge_width", c.obpf->edge_width}};
  } else if (cfg.experiment.kind == ExperimentKind::kResponse) {
    chain["obpf"] = "auto";
  } else {
    const auto resolved = auto_obpf(derive_control(cfg.waveform, c.sbs.bfs, c.sideband_sign),
                                    c.sideband_sign, c.sample_rate);
    chain["obpf"] = {{"auto", true},
                     {"low", resolved.low},
                     {"high", resolved.high},
                     {"edge_width", resolved.edge_width}};
  }
  chain["sbs"] = {{"bfs", c.sbs.bfs},
                  {"target_bw3db", c.sbs.target_bw3db},
                  {"peak_gain_db", c.sbs.peak_gain_db},
                  {"intrinsic_linewidth", calibrate_linewidth(c.sbs)}};
  chain["bpf"] = {{"low", c.bpf.band.low}, {"high", c.bpf.band.high}, {"edge_width", c.bpf.edge_width}};
  chain["noise_band"] = band_to_json(c.noise_band);

  const auto& e = cfg.experiment;
  json ex;
  ex["kind"] = to_string(e.kind);
  ex["snr_db"] = e.snr_db ? json(*e.snr_db) : json(nullptr);
  ex["snr_list"] = e.snr_list;
  ex["seeds_per_point"] = e.seeds_per_point;
  ex["control_tones"] = e.control_tones;
  ex["scan"] = {{"coarse_low", e.scan.coarse_low},
                {"coarse_high", e.scan.coarse_high},
                {"coarse_step", e.scan.coarse_step},
                {"fine_half_span", e.scan.fine_half_span},
                {"fine_step", e.scan.fine_step}};
  ex["spectrogram"] = {{"window_len", e.spectrogram.window_len},
                       {"hop", e.spectrogram.hop},
                       {"display", band_to_json(e.spectrogram.display)}};
  return {{"waveform", waveform_to_json(cfg.waveform)}, {"chain", chain}, {"experiment", ex}};
}

}  // namespace tvmpf
