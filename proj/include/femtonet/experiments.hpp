#pragma once
// Experiment orchestration: named figure reproductions and the validation
// suite, configured by flat key=value overrides, emitting datasets plus a
// run manifest.

#include <cstdint>
#include <string>
#include <vector>

#include "femtonet/io.hpp"
#include "femtonet/params.hpp"

namespace femtonet {
namespace experiments {

// Sweep description recorded in the manifest.
struct SweepSpec {
  std::string axis;            // distance | snr | velocity | delta | density | bits
  std::vector<double> values;  // nonempty
  int trials_per_point = 1;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::string experiment;   // fig2_cdf .. fig7_beta_surface, validate_all
  io::ConfigMap overrides;  // flat key=value settings (file plus CLI flags)
  std::uint64_t seed = 42;
  int trials = 100000;
  std::string out_dir = "out";
  std::string format = "csv";  // csv | json
};

// Reference configuration: 1 km cell, exponents 3.8, 2 GHz carrier, 5 dB
// wall loss folded into the femto gain, 95 femtocells per cell, 20 km/h,
// 2-frame feedback delay, 5 dB SIR threshold.
SystemParams default_params();

// default_params() with flat-key overrides applied; unknown keys are left
// for the experiment-specific reader, bad values raise ConfigError.
SystemParams params_from_config(const io::ConfigMap& cfg);

// Femtocell count over the cell disc for a density (N = lambda pi R^2).
double femtocell_count(double density, double cell_radius);
double density_from_count(double count, double cell_radius);

struct Dataset {
  std::string name;  // file basename without extension
  io::Table table;
};

struct ExperimentOutput {
  std::vector<Dataset> datasets;
  std::string manifest_json;
  std::string report_json;  // validate_all only (empty otherwise)
  bool accepted = true;     // false when validate_all recorded failures
};

// Pure compute path (no filesystem): builds every dataset for the named
// experiment. Unknown experiment names raise ConfigError.
ExperimentOutput build_experiment(const ExperimentConfig& cfg);

// Compute then write datasets + manifest under cfg.out_dir. Returns the
// process exit code: 0 success, 2 config/usage error, 3 validation
// failure, 4 numeric error.
int run_experiment(const ExperimentConfig& cfg);

// Valid experiment names, in canonical order.
const std::vector<std::string>& experiment_names();

}  // namespace experiments
}  // namespace femtonet
