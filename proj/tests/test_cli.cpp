// End-to-end checks of the command-line surface. The binary path arrives in
// PULSEKIT_CLI (set by ctest); without it the cases report and pass vacuously
// so the suite can still run standalone.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "pulsekit/csv.hpp"
#include "pulsekit/pipeline.hpp"
#include "pulsekit/rng.hpp"

using namespace pulsekit;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("PULSEKIT_CLI");
  return env ? env : "";
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct ScratchDir {
  fs::path path;
  ScratchDir() {
    path = fs::temp_directory_path() / "pulsekit_cli_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
  std::string str(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("exit codes: usage 2, data 3, schema 4") {
  if (cli_path().empty()) {
    MESSAGE("PULSEKIT_CLI not set; skipping");
    return;
  }
  ScratchDir dir;

  CHECK(run_cli("") == 2);                       // missing subcommand
  CHECK(run_cli("detect") == 2);                 // missing --input
  CHECK(run_cli("frobnicate") == 2);             // unknown subcommand

  // empty input directory is a data error with a "no inputs" diagnostic
  fs::create_directories(dir.path / "empty");
  CHECK(run_cli("detect --input " + dir.str("empty") + " --out " +
                dir.str("e.csv")) == 3);

  // config with an unknown key is a schema error
  std::ofstream(dir.str("bad.json")) << R"({"detector": {"treshold": 6}})";
  std::ofstream(dir.str("cfg.json")) << R"({"schema_version": 1})";
  CHECK(run_cli("synth --preset minke --count 1 --seed 1 --out " +
                dir.str("clips")) == 0);
  CHECK(run_cli("detect --input " + dir.str("clips") + " --out " +
                dir.str("e.csv") + " --config " + dir.str("bad.json")) == 4);
  CHECK(run_cli("detect --input " + dir.str("clips") + " --out " +
                dir.str("e.csv") + " --config " + dir.str("cfg.json")) == 0);
}

TEST_CASE("full synth/detect/train/classify/eval/run flow") {
  if (cli_path().empty()) {
    MESSAGE("PULSEKIT_CLI not set; skipping");
    return;
  }
  ScratchDir dir;

  REQUIRE(run_cli("synth --preset minke --count 4 --seed 11 --out " +
                  dir.str("clips")) == 0);
  REQUIRE(run_cli("detect --input " + dir.str("clips") + " --out " +
                  dir.str("events.csv") + " --features-out " +
                  dir.str("features.csv") + " --jobs 2") == 0);

  const CsvTable events = read_csv(dir.str("events.csv"));
  CHECK(events.rows.size() >= 3);  // one event per clip at 15 dB

  // label the detected features to train on (synthetic labels: alternate)
  {
    auto data = read_features_csv(dir.str("features.csv"));
    RngEngine rng(2);
    std::vector<DetectedEvent> rows;
    for (std::size_t i = 0; i < data.size() * 10; ++i) {
      DetectedEvent de;
      de.features = data[i % data.size()];
      de.features.f14_snr_db += uniform_range(rng, -3.0, 3.0);
      de.features.label =
          i % 2 ? EventLabel::minke : EventLabel::non_minke;
      rows.push_back(de);
    }
    std::ofstream(dir.str("labeled.csv")) << features_csv(rows);
  }
  REQUIRE(run_cli("train --features " + dir.str("labeled.csv") +
                  " --seed 5 --out " + dir.str("model.json")) == 0);
  CHECK(run_cli("classify --model " + dir.str("model.json") + " --events " +
                dir.str("features.csv") + " --out " +
                dir.str("scored.csv")) == 0);
  const CsvTable scored = read_csv(dir.str("scored.csv"));
  CHECK(scored.column("score") >= 0);
  CHECK(scored.column("predicted") >= 0);

  // eval against a multi-recording truth file (per-source matching)
  {
    std::ofstream truth(dir.str("truth.csv"));
    truth << "start_s,end_s,label,source\n";
    for (int i = 0; i < 4; ++i) {
      char name[16];
      std::snprintf(name, sizeof(name), "clip_%04d", i);
      const auto per_clip = read_csv(
          (dir.path / "clips" / (std::string(name) + ".truth.csv")).string());
      for (const auto& row : per_clip.rows) {
        truth << row[0] << ',' << row[1] << ',' << row[2] << ',' << name
              << '\n';
      }
    }
  }
  REQUIRE(run_cli("eval --pred " + dir.str("events.csv") + " --truth " +
                  dir.str("truth.csv") +
                  " --slices 8 --hours 0.033 --out " + dir.str("report.txt")) ==
          0);
  std::ifstream report(dir.str("report.txt"));
  std::stringstream report_text;
  report_text << report.rdbuf();
  CHECK(report_text.str().find("tpr 1") != std::string::npos);
  CHECK(report_text.str().find("fp_per_hour 0") != std::string::npos);

  // end-to-end run with truth produces the consolidated outputs
  REQUIRE(run_cli("run --input " + dir.str("clips") + " --model " +
                  dir.str("model.json") + " --truth " +
                  (dir.path / "clips" / "clip_0000.truth.csv").string() +
                  " --out-dir " + dir.str("run_out")) == 0);
  CHECK(fs::exists(dir.path / "run_out" / "events.csv"));
  CHECK(fs::exists(dir.path / "run_out" / "features.csv"));
  CHECK(fs::exists(dir.path / "run_out" / "report.txt"));
  CHECK(fs::exists(dir.path / "run_out" / "roc.csv"));

  // roc.csv is a monotone curve from (0,0) to (1,1)
  const CsvTable roc = read_csv((dir.path / "run_out" / "roc.csv").string());
  REQUIRE(roc.rows.size() >= 2);
  double prev_fpr = -1.0;
  double prev_tpr = -1.0;
  for (const auto& row : roc.rows) {
    const double fpr = parse_double(row[1], "roc");
    const double tpr = parse_double(row[2], "roc");
    CHECK(fpr >= prev_fpr);
    CHECK(tpr >= prev_tpr);
    prev_fpr = fpr;
    prev_tpr = tpr;
  }

  // missing truth file is an explicit error, not a silent skip
  CHECK(run_cli("run --input " + dir.str("clips") + " --model " +
                dir.str("model.json") + " --truth " + dir.str("nope.csv") +
                " --out-dir " + dir.str("run_out2")) == 3);
}

TEST_CASE("window flags override the config file") {
  if (cli_path().empty()) {
    MESSAGE("PULSEKIT_CLI not set; skipping");
    return;
  }
  ScratchDir dir;
  REQUIRE(run_cli("synth --preset minke --count 1 --seed 3 --out " +
                  dir.str("clips")) == 0);
  std::ofstream(dir.str("cfg.json"))
      << R"({"audio": {"window_s": 30.0, "hop_s": 15.0}})";

  // config alone: a 30 s clip at 30/15 gives 2 slices
  REQUIRE(run_cli("detect --input " + dir.str("clips") + " --out " +
                  dir.str("e.csv") + " --config " + dir.str("cfg.json") +
                  " --diagnostics-out " + dir.str("d1.csv")) == 0);
  CHECK(read_csv(dir.str("d1.csv")).rows.size() == 2);

  // flags win: 20/10 gives offsets 0, 10, 20
  REQUIRE(run_cli("detect --input " + dir.str("clips") + " --out " +
                  dir.str("e.csv") + " --config " + dir.str("cfg.json") +
                  " --window-s 20 --hop-s 10 --diagnostics-out " +
                  dir.str("d2.csv")) == 0);
  CHECK(read_csv(dir.str("d2.csv")).rows.size() == 3);
}

TEST_SUITE_END();
