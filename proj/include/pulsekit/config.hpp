// Run configuration: every stage tunable, grouped by stage, loaded from a
// schema-versioned JSON file. Unknown keys are rejected so typos fail loudly
// instead of silently running on defaults.
#pragma once

#include <cstdint>
#include <string>

#include "pulsekit/classifier.hpp"
#include "pulsekit/detector.hpp"
#include "pulsekit/synth.hpp"

namespace pulsekit {

struct RunConfig {
  double window_s = 30.0;
  double hop_s = 15.0;
  int channel = 0;

  FilterSpec filter;
  StftParams stft;
  double crop_lo_hz = 75.0;
  double crop_hi_hz = 350.0;
  double gamma_coefficient = 1.75;
  double dyn_range_db = 60.0;
  PulseRules rules;
  FeatureParams features;
  ForestParams forest;
  double decision_threshold = 0.5;

  DetectorConfig detector_config() const;
};

// Parses the JSON config file; throws schema_error on unknown keys, type
// mismatches, or a wrong schema_version.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const std::string& text,
                               const std::string& context);

SynthSpec load_synth_spec(const std::string& path);
SynthSpec synth_spec_from_json(const std::string& text,
                               const std::string& context);

}  // namespace pulsekit
