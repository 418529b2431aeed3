// pulsekit: batch detection and classification of periodic broadband pulse
// trains in PCM audio.
//
// Subcommands: synth, detect, train, classify, eval, run.
// Exit codes: 0 ok, 2 usage, 3 data, 4 schema.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pulsekit/audio_io.hpp"
#include "pulsekit/config.hpp"
#include "pulsekit/csv.hpp"
#include "pulsekit/error.hpp"
#include "pulsekit/kernels.hpp"
#include "pulsekit/pipeline.hpp"
#include "pulsekit/rng.hpp"
#include "pulsekit/synth.hpp"

namespace fs = std::filesystem;
using namespace pulsekit;

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
      return 2;
    case ErrorKind::data:
      return 3;
    case ErrorKind::schema:
      return 4;
  }
  return 3;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write file: " + path);
  out << text;
}

std::vector<std::string> collect_inputs(const std::string& input) {
  std::vector<std::string> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.path().extension() == ".wav") {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(input)) {
    files.push_back(input);
  }
  if (files.empty()) {
    throw data_error("no inputs: no .wav files at '" + input + "'");
  }
  return files;
}

struct CommonOptions {
  std::string config_path;
  double window_s = -1.0;  // <0 means "not overridden"
  double hop_s = -1.0;
  int channel = -1;
  std::uint64_t seed = 0;
  int jobs = 1;
};

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = load_run_config(opts.config_path);
  // flags win over the config file
  if (opts.window_s > 0.0) cfg.window_s = opts.window_s;
  if (opts.hop_s > 0.0) cfg.hop_s = opts.hop_s;
  if (opts.channel >= 0) cfg.channel = opts.channel;
  cfg.forest.seed = opts.seed;
  return cfg;
}

DetectRun detect_inputs(const std::vector<std::string>& files,
                        const RunConfig& cfg, int jobs,
                        bool keep_projections) {
  DetectRun combined;
  for (const auto& file : files) {
    const AudioStream stream = open_audio(file, cfg.channel);
    const std::string source = fs::path(file).stem().string();
    DetectRun run =
        detect_stream(stream, cfg, source, jobs, keep_projections);
    combined.n_slices += run.n_slices;
    combined.hours += run.hours;
    for (auto& e : run.events) combined.events.push_back(std::move(e));
    for (auto& d : run.diagnostics) {
      combined.diagnostics.push_back(std::move(d));
    }
    for (auto& p : run.projections) {
      combined.projections.push_back(std::move(p));
    }
  }
  return combined;
}

std::vector<TruthInterval> load_truth(const std::string& path) {
  std::vector<TruthInterval> truth;
  for (const auto& e : read_truth_csv(path)) {
    truth.push_back({e.start_s, e.end_s, e.label, e.source});
  }
  return truth;
}

int cmd_synth(const std::string& spec_path, const std::string& preset,
              const std::string& out_dir, int count, std::uint64_t seed,
              double snr_db) {
  fs::create_directories(out_dir);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t clip_seed = seed + static_cast<std::uint64_t>(i);
    SynthSpec spec;
    if (!spec_path.empty()) {
      spec = load_synth_spec(spec_path);
      spec.seed = clip_seed;
    } else if (preset == "minke") {
      spec = make_minke_preset(clip_seed, snr_db);
    } else if (preset == "distractor") {
      spec = make_distractor_preset(clip_seed);
    } else {
      throw usage_error("synth needs --spec or --preset minke|distractor");
    }
    const ClipResult clip = generate_clip(spec);
    char name[32];
    std::snprintf(name, sizeof(name), "clip_%04d", i);
    const std::string base = (fs::path(out_dir) / name).string();
    write_wav(base + ".wav", clip.stream, WavSampleFormat::float32);
    write_truth_csv(clip.truth, base + ".truth.csv");
    if (clip.gain_reduced) {
      std::cerr << name << ": scaled by " << clip.gain
                << " to avoid clipping\n";
    }
  }
  std::cout << "wrote " << count << " clip(s) to " << out_dir << "\n";
  return 0;
}

int cmd_detect(const std::string& input, const CommonOptions& opts,
               const std::string& out_events, const std::string& out_features,
               const std::string& out_diagnostics,
               const std::string& out_projections) {
  const RunConfig cfg = resolve_config(opts);
  const auto files = collect_inputs(input);
  const DetectRun run =
      detect_inputs(files, cfg, opts.jobs, !out_projections.empty());

  write_text(out_events, events_csv(run.events));
  if (!out_features.empty()) {
    write_text(out_features, features_csv(run.events));
  }
  if (!out_diagnostics.empty()) {
    write_text(out_diagnostics, diagnostics_csv(run.diagnostics));
  }
  if (!out_projections.empty()) {
    write_text(out_projections, projections_csv(run.projections));
  }
  std::cout << run.events.size() << " event(s) over " << run.n_slices
            << " slice(s), " << format_double(run.hours) << " h\n";
  return 0;
}

int cmd_train(const std::string& features_path, std::uint64_t seed,
              const std::string& out_path, const RunConfig& cfg) {
  std::vector<FeatureVector> data = read_features_csv(features_path);
  ForestParams params = cfg.forest;
  params.seed = seed;
  const ForestModel model = train_forest(data, params);
  save_model(model, out_path);
  std::cout << "trained " << model.trees.size() << " trees on "
            << data.size() << " examples; oob_accuracy "
            << format_double(model.oob_accuracy) << "\n";
  return 0;
}

int cmd_classify(const std::string& model_path,
                 const std::string& events_path, double threshold,
                 const std::string& out_path) {
  const ForestModel model = load_model(model_path);
  const std::vector<FeatureVector> data = read_features_csv(events_path);

  std::vector<std::string> header;
  for (int i = 1; i <= 18; ++i) header.push_back("f" + std::to_string(i));
  header.insert(header.end(), {"label", "score", "predicted"});
  CsvWriter w(header);
  for (const auto& fv : data) {
    const Prediction p = predict(model, fv, threshold);
    std::vector<std::string> row;
    for (double v : fv.values()) row.push_back(format_double(v));
    row.push_back(label_name(fv.label));
    row.push_back(format_double(p.score));
    row.push_back(label_name(p.label));
    w.add_row(std::move(row));
  }
  if (out_path.empty()) {
    std::cout << w.text();
  } else {
    w.write_file(out_path);
  }
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path,
             long slices, double hours, const std::string& out_path,
             const std::string& roc_path) {
  const CsvTable pred = read_csv(pred_path);
  const int c_start = pred.column("start_s");
  const int c_end = pred.column("end_s");
  const int c_score = pred.column("score");
  const int c_source = pred.column("source");
  if (c_start < 0 || c_end < 0) {
    throw schema_error(pred_path + ": need start_s and end_s columns");
  }
  std::vector<PredictedInterval> intervals;
  std::vector<DetectedEvent> scored_events;
  for (const auto& row : pred.rows) {
    PredictedInterval interval{parse_double(row[c_start], pred_path),
                               parse_double(row[c_end], pred_path),
                               c_source >= 0 ? row[c_source] : ""};
    intervals.push_back(interval);
    if (c_score >= 0 && !row[c_score].empty()) {
      DetectedEvent de;
      de.event.start_time = interval.start_s;
      de.event.end_time = interval.end_s;
      de.event.score = parse_double(row[c_score], pred_path);
      de.source = interval.source;
      scored_events.push_back(std::move(de));
    }
  }
  const std::vector<TruthInterval> truth = load_truth(truth_path);

  const ConfusionMatrix cm =
      match_events_to_truth_grouped(intervals, truth, slices, hours);
  MetricsReport metrics = compute_metrics(cm);

  std::string roc_text;
  if (scored_events.size() == intervals.size() && !scored_events.empty()) {
    const RocCurve curve =
        sweep_system_roc(scored_events, truth, slices, hours);
    metrics.auc = curve.auc;
    roc_text = roc_csv(curve);
  }

  const std::string report = metrics_report_text(cm, metrics);
  if (out_path.empty()) {
    std::cout << report;
  } else {
    write_text(out_path, report);
  }
  if (!roc_path.empty()) {
    if (roc_text.empty()) {
      throw data_error("ROC requested but predictions carry no scores");
    }
    write_text(roc_path, roc_text);
  }
  return 0;
}

int cmd_run(const std::string& input, const CommonOptions& opts,
            const std::string& model_path, const std::string& truth_path,
            double threshold, const std::string& out_dir) {
  const RunConfig cfg = resolve_config(opts);
  fs::create_directories(out_dir);
  const auto files = collect_inputs(input);
  DetectRun run = detect_inputs(files, cfg, opts.jobs, false);

  const ForestModel model = load_model(model_path);
  classify_events(model, &run.events, threshold);

  write_text((fs::path(out_dir) / "events.csv").string(),
             events_csv(run.events));
  write_text((fs::path(out_dir) / "features.csv").string(),
             features_csv(run.events));

  if (!truth_path.empty()) {
    const std::vector<TruthInterval> truth = load_truth(truth_path);
    std::vector<PredictedInterval> accepted;
    for (const auto& de : run.events) {
      if (de.event.score && *de.event.score >= threshold) {
        accepted.push_back({de.event.start_time, de.event.end_time,
                            de.source});
      }
    }
    const ConfusionMatrix cm =
        match_events_to_truth_grouped(accepted, truth, run.n_slices,
                                      run.hours);
    MetricsReport metrics = compute_metrics(cm);
    const RocCurve curve =
        sweep_system_roc(run.events, truth, run.n_slices, run.hours);
    metrics.auc = curve.auc;
    write_text((fs::path(out_dir) / "report.txt").string(),
               metrics_report_text(cm, metrics));
    write_text((fs::path(out_dir) / "roc.csv").string(), roc_csv(curve));
  }
  std::cout << run.events.size() << " classified event(s) in " << out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic pulse-train detection and classification toolkit"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string input;
  std::string out_events = "events.csv";
  std::string out_features;
  std::string out_diagnostics;
  std::string out_projections;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "run config JSON");
    cmd->add_option("--window-s", common.window_s, "slice window (s)");
    cmd->add_option("--hop-s", common.hop_s, "slice hop (s)");
    cmd->add_option("--channel", common.channel, "channel index");
    cmd->add_option("--seed", common.seed, "run seed");
    cmd->add_option("--jobs", common.jobs, "worker threads");
  };

  auto* detect = app.add_subcommand("detect", "detect pulse trains");
  detect->add_option("--input", input, "WAV file or directory")->required();
  detect->add_option("--out", out_events, "events CSV path");
  detect->add_option("--features-out", out_features, "features CSV path");
  detect->add_option("--diagnostics-out", out_diagnostics,
                     "per-slice diagnostics CSV");
  detect->add_option("--dump-projections", out_projections,
                     "projection profiles CSV");
  add_common(detect);

  std::string features_path;
  std::string model_out = "model.json";
  auto* train = app.add_subcommand("train", "train the random forest");
  train->add_option("--features", features_path, "labeled feature CSV")
      ->required();
  train->add_option("--out", model_out, "model file path");
  add_common(train);

  std::string model_path;
  std::string classify_out;
  double threshold = 0.5;
  auto* classify = app.add_subcommand("classify", "score feature vectors");
  classify->add_option("--model", model_path, "model file")->required();
  classify->add_option("--events", features_path, "feature CSV")->required();
  classify->add_option("--threshold", threshold, "decision threshold");
  classify->add_option("--out", classify_out, "output CSV (default stdout)");

  std::string truth_path;
  std::string report_out;
  std::string roc_out;
  long eval_slices = 0;
  double eval_hours = 0.0;
  auto* eval = app.add_subcommand("eval", "score predictions against truth");
  eval->add_option("--pred", input, "predictions CSV")->required();
  eval->add_option("--truth", truth_path, "truth CSV")->required();
  eval->add_option("--slices", eval_slices, "evaluated slice count")
      ->required();
  eval->add_option("--hours", eval_hours, "evaluated hours")->required();
  eval->add_option("--out", report_out, "report path (default stdout)");
  eval->add_option("--roc-out", roc_out, "ROC curve CSV");

  std::string synth_spec;
  std::string synth_preset;
  std::string synth_out = "synth_out";
  int synth_count = 1;
  double synth_snr = 15.0;
  auto* synth = app.add_subcommand("synth", "generate synthetic clips");
  synth->add_option("--spec", synth_spec, "synth spec JSON");
  synth->add_option("--preset", synth_preset, "minke or distractor");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--count", synth_count, "number of clips");
  synth->add_option("--seed", common.seed, "base seed");
  synth->add_option("--snr-db", synth_snr, "preset SNR (dB)");

  std::string run_out = "run_out";
  auto* run = app.add_subcommand("run", "detect + classify (+ eval)");
  run->add_option("--input", input, "WAV file or directory")->required();
  run->add_option("--model", model_path, "model file")->required();
  run->add_option("--truth", truth_path, "truth CSV (enables report)");
  run->add_option("--threshold", threshold, "decision threshold");
  run->add_option("--out-dir", run_out, "output directory");
  add_common(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (detect->parsed()) {
      return cmd_detect(input, common, out_events, out_features,
                        out_diagnostics, out_projections);
    }
    if (train->parsed()) {
      return cmd_train(features_path, common.seed, model_out,
                       resolve_config(common));
    }
    if (classify->parsed()) {
      return cmd_classify(model_path, features_path, threshold, classify_out);
    }
    if (eval->parsed()) {
      return cmd_eval(input, truth_path, eval_slices, eval_hours, report_out,
                      roc_out);
    }
    if (synth->parsed()) {
      return cmd_synth(synth_spec, synth_preset, synth_out, synth_count,
                       common.seed, synth_snr);
    }
    if (run->parsed()) {
      return cmd_run(input, common, model_path, truth_path, threshold,
                     run_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
