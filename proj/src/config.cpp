#include "pulsekit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "pulsekit/error.hpp"

namespace pulsekit {

namespace {

using nlohmann::json;

constexpr int kConfigSchemaVersion = 1;

// Walks an object with a fixed key set; unknown keys are schema errors.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) {
      throw schema_error(name_ + ": expected a JSON object");
    }
  }

  ~Section() = default;

  template <typename T>
  void get(const char* key, T* out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      *out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw schema_error(name_ + "." + key + ": wrong value type");
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw schema_error(name_ + ": unknown key '" + key + "'");
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

DetectorConfig RunConfig::detector_config() const {
  DetectorConfig dc;
  dc.filter = filter;
  dc.stft = stft;
  dc.crop_lo_hz = crop_lo_hz;
  dc.crop_hi_hz = crop_hi_hz;
  dc.gamma_coefficient = gamma_coefficient;
  dc.dyn_range_db = dyn_range_db;
  dc.rules = rules;
  return dc;
}

RunConfig run_config_from_json(const std::string& text,
                               const std::string& context) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw schema_error(context + ": invalid JSON: " + e.what());
  }

  RunConfig cfg;
  Section top(root, context);
  int version = kConfigSchemaVersion;
  top.get("schema_version", &version);
  if (version != kConfigSchemaVersion) {
    throw schema_error(context + ": unsupported schema_version " +
                       std::to_string(version));
  }

  bool stft_hop_given = false;
  if (top.has("audio")) {
    Section s(root["audio"], context + ".audio");
    s.get("window_s", &cfg.window_s);
    s.get("hop_s", &cfg.hop_s);
    s.get("channel", &cfg.channel);
    s.finish();
  }
  if (top.has("filter")) {
    Section s(root["filter"], context + ".filter");
    s.get("pass_lo_hz", &cfg.filter.pass_lo_hz);
    s.get("pass_hi_hz", &cfg.filter.pass_hi_hz);
    s.get("stop_attenuation_db", &cfg.filter.stop_attenuation_db);
    s.get("transition_hz", &cfg.filter.transition_hz);
    s.get("passband_ripple_db", &cfg.filter.passband_ripple_db);
    s.finish();
  }
  if (top.has("stft")) {
    Section s(root["stft"], context + ".stft");
    s.get("nfft", &cfg.stft.nfft);
    s.get("window", &cfg.stft.window_kind);
    stft_hop_given = s.has("hop_samples");
    s.get("hop_samples", &cfg.stft.hop_samples);
    s.finish();
  }
  if (!stft_hop_given) {
    // default hop is 8% of the frame
    cfg.stft.hop_samples =
        std::max(1, static_cast<int>(std::lround(0.08 * cfg.stft.nfft)));
  }
  if (top.has("crop")) {
    Section s(root["crop"], context + ".crop");
    s.get("lo_hz", &cfg.crop_lo_hz);
    s.get("hi_hz", &cfg.crop_hi_hz);
    s.finish();
  }
  if (top.has("binarize")) {
    Section s(root["binarize"], context + ".binarize");
    s.get("gamma_coefficient", &cfg.gamma_coefficient);
    s.get("dyn_range_db", &cfg.dyn_range_db);
    s.finish();
  }
  if (top.has("detector")) {
    Section s(root["detector"], context + ".detector");
    s.get("threshold", &cfg.rules.threshold);
    s.get("min_peaks", &cfg.rules.min_peaks);
    s.get("max_peaks", &cfg.rules.max_peaks);
    s.get("ipi_lo_s", &cfg.rules.ipi_lo_s);
    s.get("ipi_hi_s", &cfg.rules.ipi_hi_s);
    s.get("ipi_conformity", &cfg.rules.ipi_conformity);
    s.finish();
  }
  if (top.has("features")) {
    Section s(root["features"], context + ".features");
    s.get("pulse_window_s", &cfg.features.pulse_window_s);
    s.finish();
  }
  if (top.has("forest")) {
    Section s(root["forest"], context + ".forest");
    s.get("n_trees", &cfg.forest.n_trees);
    s.get("n_split_features", &cfg.forest.n_split_features);
    s.get("max_depth", &cfg.forest.max_depth);
    s.get("min_leaf", &cfg.forest.min_leaf);
    s.finish();
  }
  if (top.has("classify")) {
    Section s(root["classify"], context + ".classify");
    s.get("decision_threshold", &cfg.decision_threshold);
    s.finish();
  }

  // consume section keys at top level, then reject the rest
  {
    Section check(root, context);
    int v;
    check.get("schema_version", &v);
    json dummy;
    for (const char* key : {"audio", "filter", "stft", "crop", "binarize",
                            "detector", "features", "forest", "classify"}) {
      if (root.contains(key)) {
        if (!root[key].is_object()) {
          throw schema_error(context + "." + key + ": expected an object");
        }
      }
      check.get(key, &dummy);
    }
    check.finish();
  }

  if (!(cfg.hop_s > 0.0) || cfg.hop_s > cfg.window_s) {
    throw schema_error(context + ": need 0 < hop_s <= window_s");
  }
  if (!(cfg.rules.ipi_lo_s > 0.0) ||
      !(cfg.rules.ipi_lo_s < cfg.rules.ipi_hi_s)) {
    throw schema_error(context + ": need 0 < ipi_lo_s < ipi_hi_s");
  }
  if (cfg.rules.min_peaks <= 0 ||
      cfg.rules.min_peaks > cfg.rules.max_peaks) {
    throw schema_error(context + ": need 0 < min_peaks <= max_peaks");
  }
  if (!(cfg.rules.ipi_conformity > 0.0) || cfg.rules.ipi_conformity > 1.0) {
    throw schema_error(context + ": ipi_conformity must be in (0, 1]");
  }
  if (cfg.stft.nfft < 2 || (cfg.stft.nfft & (cfg.stft.nfft - 1)) != 0) {
    throw schema_error(context + ": stft.nfft must be a power of two");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return run_config_from_json(text, path);
}

SynthSpec synth_spec_from_json(const std::string& text,
                               const std::string& context) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw schema_error(context + ": invalid JSON: " + e.what());
  }

  SynthSpec spec;
  Section top(root, context);
  top.get("sample_rate", &spec.sample_rate);
  top.get("duration_s", &spec.duration_s);
  top.get("seed", &spec.seed);

  if (top.has("noise")) {
    Section s(root["noise"], context + ".noise");
    std::string kind = "white";
    s.get("kind", &kind);
    if (kind == "white") {
      spec.noise_kind = NoiseKind::white;
    } else if (kind == "pink") {
      spec.noise_kind = NoiseKind::pink;
    } else {
      throw schema_error(context + ".noise.kind: must be white or pink");
    }
    s.get("variance", &spec.noise_variance);
    s.finish();
  }
  if (top.has("analysis_band")) {
    Section s(root["analysis_band"], context + ".analysis_band");
    s.get("lo_hz", &spec.analysis_band_lo_hz);
    s.get("hi_hz", &spec.analysis_band_hi_hz);
    s.finish();
  }
  if (top.has("trains")) {
    if (!root["trains"].is_array()) {
      throw schema_error(context + ".trains: expected an array");
    }
    for (const auto& jt : root["trains"]) {
      Section s(jt, context + ".trains[]");
      TrainSpec t;
      s.get("start_s", &t.start_s);
      s.get("pulse_rate_hz", &t.pulse_rate_hz);
      s.get("n_pulses", &t.n_pulses);
      s.get("pulse_dur_s", &t.pulse_dur_s);
      s.get("band_lo_hz", &t.band_lo_hz);
      s.get("band_hi_hz", &t.band_hi_hz);
      s.get("snr_db", &t.snr_db);
      s.get("rate_jitter_pct", &t.rate_jitter_pct);
      s.get("label", &t.label);
      s.finish();
      spec.trains.push_back(std::move(t));
    }
  }
  if (top.has("narrowband_tones")) {
    if (!root["narrowband_tones"].is_array()) {
      throw schema_error(context + ".narrowband_tones: expected an array");
    }
    for (const auto& jt : root["narrowband_tones"]) {
      Section s(jt, context + ".narrowband_tones[]");
      ToneSpec t;
      s.get("freq_hz", &t.freq_hz);
      s.get("level_db", &t.level_db);
      s.finish();
      spec.narrowband_tones.push_back(t);
    }
  }

  {
    Section check(root, context);
    json dummy;
    for (const char* key : {"sample_rate", "duration_s", "seed", "noise",
                            "analysis_band", "trains", "narrowband_tones"}) {
      check.get(key, &dummy);
    }
    check.finish();
  }
  return spec;
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open synth spec: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return synth_spec_from_json(text, path);
}

}  // namespace pulsekit
