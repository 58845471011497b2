#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "femtonet/analytics.hpp"
#include "femtonet/experiments.hpp"
#include "femtonet/io.hpp"
#include "femtonet/params.hpp"

using namespace femtonet;
using experiments::ExperimentConfig;
using experiments::ExperimentOutput;

namespace {

const io::Table& find_dataset(const ExperimentOutput& out,
                              const std::string& name) {
  for (const auto& ds : out.datasets)
    if (ds.name == name) return ds.table;
  REQUIRE_MESSAGE(false, "dataset not found: " << name);
  static io::Table empty;
  return empty;
}

ExperimentConfig make_cfg(const std::string& name, io::ConfigMap overrides,
                          int trials) {
  ExperimentConfig cfg;
  cfg.experiment = name;
  cfg.overrides = std::move(overrides);
  cfg.seed = 42;
  cfg.trials = trials;
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config file parsing

TEST_CASE("config text parses key=value lines with comments") {
  const std::string text =
      "# leading comment\n"
      "\n"
      "n_b = 4\n"
      "velocity_kmh=30.5\n"
      "  bits = 6   # trailing comment\n"
      "name = fig2_cdf\n"
      "bits = 7\n";
  const io::ConfigMap cfg = io::parse_config_text(text);
  CHECK(cfg.size() == 4);
  CHECK(io::config_int(cfg, "n_b", -1) == 4);
  CHECK(io::config_double(cfg, "velocity_kmh", 0.0) ==
        doctest::Approx(30.5).epsilon(1e-12));
  // Duplicate keys: the last assignment wins.
  CHECK(io::config_int(cfg, "bits", -1) == 7);
  CHECK(io::config_string(cfg, "name", "") == "fig2_cdf");
  CHECK(io::config_has(cfg, "n_b"));
  CHECK_FALSE(io::config_has(cfg, "missing"));
  CHECK(io::config_double(cfg, "missing", 2.5) == 2.5);
  CHECK(io::config_int(cfg, "missing", 9) == 9);
  CHECK(io::config_string(cfg, "missing", "dflt") == "dflt");
}

TEST_CASE("malformed config lines and values raise ConfigError") {
  CHECK_THROWS_AS(io::parse_config_text("just a bare token\n"),
                  io::ConfigError);
  const io::ConfigMap cfg = io::parse_config_text("bits = six\n");
  CHECK_THROWS_AS(io::config_int(cfg, "bits", 0), io::ConfigError);
  CHECK_THROWS_AS(io::config_double(cfg, "bits", 0.0), io::ConfigError);
}

TEST_CASE("tables serialize to csv and json records") {
  io::Table t;
  t.columns = {"a", "b"};
  t.add_row({1.0, 0.5});
  t.add_row({2.0, 0.25});
  CHECK(io::to_csv(t) == "a,b\n1,0.5\n2,0.25\n");
  const nlohmann::json j = nlohmann::json::parse(io::to_json_records(t));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0].at("a").get<double>() == 1.0);
  CHECK(j[1].at("b").get<double>() == 0.25);
  // Twelve significant digits, stable across runs.
  CHECK(io::format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_double(2.0) == "2");
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-11));
}

// ---------------------------------------------------------------------------
// Parameter resolution

TEST_CASE("reference configuration matches the documented cell") {
  const SystemParams p = experiments::default_params();
  CHECK_NOTHROW(p.validate());
  CHECK(p.n_b == 4);
  CHECK(p.n_f == 4);
  CHECK(p.bits == 5);
  CHECK(p.cell_radius == 1000.0);
  CHECK(p.user_distance == 1000.0);
  CHECK(p.mobility.delay_frames == 2);
  CHECK(experiments::femtocell_count(p.density, p.cell_radius) ==
        doctest::Approx(95.0).epsilon(1e-12));
  // Macro gain is calibrated for ~5 dB mean SNR at the 1 km edge.
  CHECK(p.snr_db() == doctest::Approx(5.0).epsilon(1e-3));
  // The femto gain sits 35 dB below the macro gain.
  CHECK(p.pathloss.rho_f / p.pathloss.rho_m ==
        doctest::Approx(std::pow(10.0, -3.5)).epsilon(1e-12));
}

TEST_CASE("flat key overrides reach the parameter bundle") {
  io::ConfigMap cfg;
  cfg["velocity_kmh"] = "30";
  cfg["n_femtocells"] = "50";
  cfg["sir_threshold_db"] = "10";
  cfg["user_distance_m"] = "250";
  cfg["rho_m"] = "1e9";
  SystemParams p = experiments::params_from_config(cfg);
  CHECK(p.mobility.velocity * 3.6 == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(experiments::femtocell_count(p.density, p.cell_radius) ==
        doctest::Approx(50.0).epsilon(1e-12));
  CHECK(p.sir_threshold == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(p.user_distance == 250.0);
  CHECK(p.pathloss.rho_m == 1e9);
  // The gain ratio default applies against the overridden macro gain.
  CHECK(p.pathloss.rho_f / p.pathloss.rho_m ==
        doctest::Approx(std::pow(10.0, -3.5)).epsilon(1e-12));

  // An explicit density takes precedence over a femtocell count.
  cfg["density"] = "1e-5";
  p = experiments::params_from_config(cfg);
  CHECK(p.density == 1e-5);

  io::ConfigMap bad;
  bad["n_b"] = "four";
  CHECK_THROWS_AS(experiments::params_from_config(bad), io::ConfigError);
}

TEST_CASE("experiment names and request validation") {
  const auto& names = experiments::experiment_names();
  REQUIRE(names.size() == 7);
  CHECK(names.front() == "fig2_cdf");
  CHECK(names.back() == "validate_all");

  ExperimentConfig cfg = make_cfg("fig99_nonsense", {}, 100);
  CHECK_THROWS_AS(experiments::build_experiment(cfg), io::ConfigError);

  cfg = make_cfg("fig7_beta_surface", {}, 100);
  cfg.format = "xml";
  CHECK_THROWS_AS(experiments::build_experiment(cfg), io::ConfigError);

  cfg = make_cfg("fig7_beta_surface", {}, 0);
  CHECK_THROWS_AS(experiments::build_experiment(cfg), io::ConfigError);
}

// ---------------------------------------------------------------------------
// Experiment builders (reduced sizes)

TEST_CASE("effective power cdf sweep emits a matching empirical curve") {
  io::ConfigMap ov;
  ov["velocities_kmh"] = "20";
  ov["cdf_points"] = "64";
  const ExperimentOutput out =
      experiments::build_experiment(make_cfg("fig2_cdf", ov, 5000));
  REQUIRE(out.datasets.size() == 1);
  const io::Table& t = find_dataset(out, "fig2_cdf_v20");
  REQUIRE(t.columns == std::vector<std::string>{"z", "empirical_cdf",
                                                "analytic_cdf"});
  REQUIRE(t.rows.size() == 64);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double z = t.rows[i][0];
    const double emp = t.rows[i][1];
    const double ana = t.rows[i][2];
    CHECK(z > 0.0);
    CHECK(emp > 0.0);
    CHECK(emp <= 1.0);
    CHECK(ana >= 0.0);
    CHECK(ana <= 1.0);
    if (i > 0) {
      CHECK(z >= t.rows[i - 1][0]);
      CHECK(emp > t.rows[i - 1][1]);
    }
    worst = std::max(worst, std::fabs(emp - ana));
  }
  // Bound covers the quantizer-model shape gap plus sampling noise.
  CHECK(worst < 0.08);
}

TEST_CASE("outage sweep reports calibrated intervals along the distance axis") {
  io::ConfigMap ov;
  ov["sweep_points"] = "3";
  const ExperimentOutput out =
      experiments::build_experiment(make_cfg("fig3_outage", ov, 5000));
  REQUIRE(out.datasets.size() == 1);
  const io::Table& t = find_dataset(out, "fig3_outage");
  REQUIRE(t.columns ==
          std::vector<std::string>{"distance_m", "snr_db", "outage_analytic",
                                   "outage_empirical", "half_width_95"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0][0] == 40.0);
  CHECK(t.rows[1][0] == 130.0);
  CHECK(t.rows[2][0] == 220.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i][2] > 0.0);
    CHECK(t.rows[i][2] < 1.0);
    CHECK(std::fabs(t.rows[i][3] - t.rows[i][2]) < 0.04);
    CHECK(t.rows[i][4] > 0.0);
    CHECK(t.rows[i][4] < 0.05);
    if (i > 0) CHECK(t.rows[i][2] > t.rows[i - 1][2]);
  }
  // SNR falls with distance.
  CHECK(t.rows[0][1] > t.rows[2][1]);
}

TEST_CASE("density limit sweep reproduces the frozen per-bit counts") {
  io::ConfigMap ov;
  ov["bits_list"] = "4,6";
  ov["distances_m"] = "150";
  const ExperimentOutput out =
      experiments::build_experiment(make_cfg("fig4_density", ov, 1));
  REQUIRE(out.datasets.size() == 2);
  const io::Table& exact = find_dataset(out, "fig4_density");
  const io::Table& closed = find_dataset(out, "fig4_density_closed_form");
  REQUIRE(exact.columns ==
          std::vector<std::string>{"snr_db", "bits", "max_femtocells"});
  REQUIRE(closed.columns == exact.columns);
  REQUIRE(exact.rows.size() == 2);
  REQUIRE(closed.rows.size() == 2);
  CHECK(exact.rows[0][1] == 4.0);
  CHECK(exact.rows[1][1] == 6.0);
  const double pi_r2 = M_PI * 1000.0 * 1000.0;
  CHECK(exact.rows[0][2] ==
        doctest::Approx(1.138924683474352e-4 * pi_r2).epsilon(1e-6));
  CHECK(exact.rows[1][2] ==
        doctest::Approx(2.0454117354093778e-4 * pi_r2).epsilon(1e-6));
  // More feedback bits support more interferers.
  CHECK(exact.rows[1][2] > exact.rows[0][2]);
  // The single-scale closed form is far more conservative.
  for (std::size_t i = 0; i < exact.rows.size(); ++i) {
    CHECK(closed.rows[i][2] > 0.0);
    CHECK(closed.rows[i][2] < 0.1 * exact.rows[i][2]);
  }
}

TEST_CASE("density limit sweep can average over cell positions") {
  io::ConfigMap ov;
  ov["bits_list"] = "4";
  ov["distances_m"] = "150";
  ov["user_average"] = "1";
  const ExperimentOutput out =
      experiments::build_experiment(make_cfg("fig4_density", ov, 1));
  REQUIRE(out.datasets.size() == 3);
  const io::Table& avg = find_dataset(out, "fig4_user_avg");
  REQUIRE(avg.columns ==
          std::vector<std::string>{"bits", "max_femtocells_user_avg"});
  REQUIRE(avg.rows.size() == 1);
  CHECK(avg.rows[0][0] == 4.0);
  // Cell-averaged count lies between the far-edge and capped extremes.
  CHECK(avg.rows[0][1] > 1.0);
  CHECK(avg.rows[0][1] < 1.0 * M_PI * 1000.0 * 1000.0);
}

TEST_CASE("delay-limited goodput sweep pairs simulation with quadrature") {
  io::ConfigMap ov;
  ov["snr_db_list"] = "10";
  const ExperimentOutput out =
      experiments::build_experiment(make_cfg("fig5_goodput_delay", ov, 20000));
  REQUIRE(out.datasets.size() == 1);
  const io::Table& t = find_dataset(out, "fig5_goodput_delay");
  REQUIRE(t.columns ==
          std::vector<std::string>{"snr_db",
                                   "goodput_no_backoff_bps_hz",
                                   "goodput_backoff_exact_bps_hz",
                                   "goodput_backoff_poly_bps_hz",
                                   "throughput_bps_hz",
                                   "analytic_no_backoff_bps_hz",
                                   "analytic_backoff_exact_bps_hz",
                                   "analytic_backoff_poly_bps_hz",
                                   "analytic_tx_rate_bps_hz"});
  REQUIRE(t.rows.size() == 1);
  const auto& r = t.rows[0];
  CHECK(r[0] == 10.0);
  const double g_none = r[1], g_exact = r[2], g_poly = r[3], thr = r[4];
  // Pathwise: a successful transmission never beats the supported rate.
  CHECK(g_none <= thr + 1e-12);
  CHECK(g_exact <= thr + 1e-12);
  CHECK(g_poly <= thr + 1e-12);
  // Backoff buys a large goodput gain at this operating point.
  CHECK(g_exact > g_none + 0.3);
  CHECK(g_poly > g_none + 0.3);
  // Quadrature columns match their frozen references.
  CHECK(r[5] == doctest::Approx(1.5277681971944832).epsilon(1e-4));
  CHECK(r[6] == doctest::Approx(2.3338570347226746).epsilon(1e-4));
  CHECK(r[7] == doctest::Approx(2.3314668690331897).epsilon(1e-4));
  CHECK(r[8] == doctest::Approx(3.9721869336155757).epsilon(1e-4));
  // Simulation sits near its analytic counterpart.
  CHECK(g_exact == doctest::Approx(r[6]).epsilon(0.1));
}

TEST_CASE("interference goodput sweep orders the strategies") {
  io::ConfigMap ov;
  ov["distances_m"] = "200";
  ov["rho_bar_trials"] = "20000";
  const ExperimentOutput out = experiments::build_experiment(
      make_cfg("fig6_goodput_interference", ov, 5000));
  REQUIRE(out.datasets.size() == 1);
  const io::Table& t = find_dataset(out, "fig6_goodput_interference");
  REQUIRE(t.columns ==
          std::vector<std::string>{"distance_m",
                                   "snr_db",
                                   "goodput_no_backoff_bps_hz",
                                   "goodput_backoff_exact_bps_hz",
                                   "goodput_backoff_poly_bps_hz",
                                   "throughput_bps_hz",
                                   "random_beamforming_bps_hz",
                                   "analytic_no_backoff_bps_hz",
                                   "analytic_backoff_exact_bps_hz"});
  REQUIRE(t.rows.size() == 1);
  const auto& r = t.rows[0];
  CHECK(r[0] == 200.0);
  CHECK(r[1] ==
        doctest::Approx(10.0 * std::log10(7.943e11 * std::pow(200.0, -3.8)))
            .epsilon(1e-9));
  const double g_none = r[2], g_exact = r[3], g_poly = r[4];
  const double thr = r[5], rb = r[6];
  CHECK(g_none <= thr + 1e-12);
  CHECK(g_exact <= thr + 1e-12);
  CHECK(g_poly <= thr + 1e-12);
  // At the interference-limited optimum the exact policy keeps full power,
  // matching the no-backoff strategy; the quadratic approximation backs off
  // hard and pays for it here (~0.67x at this distance).
  CHECK(g_exact >= g_none - 1e-3);
  CHECK(g_poly < g_exact);
  CHECK(g_poly > 0.5 * g_exact);
  // Quantized beamforming clearly beats an uninformed beam.
  CHECK(thr > rb + 0.3);
  CHECK(r[7] > 0.0);
  CHECK(r[8] > 0.0);
}

TEST_CASE("average backoff surface reproduces frozen corner values") {
  io::ConfigMap ov;
  ov["velocities_kmh"] = "20,40";
  ov["delta_list"] = "0.2,0.8";
  const ExperimentOutput out =
      experiments::build_experiment(make_cfg("fig7_beta_surface", ov, 1));
  REQUIRE(out.datasets.size() == 1);
  const io::Table& t = find_dataset(out, "fig7_beta_surface");
  REQUIRE(t.columns ==
          std::vector<std::string>{"velocity_kmh", "delta", "beta_avg"});
  REQUIRE(t.rows.size() == 4);
  const double expected[4][3] = {
      {20.0, 0.2, 0.509566308142298},
      {20.0, 0.8, 0.5304607100577758},
      {40.0, 0.2, 0.3872162843180549},
      {40.0, 0.8, 0.41497078967244116},
  };
  for (int i = 0; i < 4; ++i) {
    CHECK(t.rows[i][0] == expected[i][0]);
    CHECK(t.rows[i][1] == expected[i][1]);
    CHECK(t.rows[i][2] == doctest::Approx(expected[i][2]).epsilon(5e-4));
  }
}

// ---------------------------------------------------------------------------
// Manifest and filesystem output

TEST_CASE("manifest records the run without wall-clock state") {
  io::ConfigMap ov;
  ov["velocities_kmh"] = "20,40";
  ov["delta_list"] = "0.2,0.8";
  const ExperimentConfig cfg = make_cfg("fig7_beta_surface", ov, 1);
  const ExperimentOutput out = experiments::build_experiment(cfg);
  const nlohmann::json m = nlohmann::json::parse(out.manifest_json);
  CHECK(m.at("tool") == "femtonet");
  CHECK(m.at("version") == "1.0.0");
  CHECK(m.at("experiment") == "fig7_beta_surface");
  CHECK(m.at("seed") == 42);
  CHECK(m.at("trials") == 1);
  CHECK(m.at("format") == "csv");
  CHECK(m.at("params").at("n_b") == 4);
  CHECK(m.at("params").at("velocity_kmh").get<double>() ==
        doctest::Approx(20.0).epsilon(1e-12));
  CHECK(m.at("params").contains("correlation"));
  CHECK(m.at("sweep").at("axis") == "velocity");
  CHECK(m.at("sweep").at("values") == nlohmann::json({20.0, 40.0}));
  CHECK(m.at("datasets") == nlohmann::json({"fig7_beta_surface"}));
  CHECK(m.at("config_overrides").at("delta_list") == "0.2,0.8");
  // Reproducible runs must not embed timestamps, hosts, or worker counts.
  for (const std::string key :
       {"time", "timestamp", "date", "host", "hostname", "threads",
        "workers"})
    CHECK_FALSE(m.contains(key));
  // The manifest itself is deterministic.
  const ExperimentOutput again = experiments::build_experiment(cfg);
  CHECK(again.manifest_json == out.manifest_json);
}

TEST_CASE("run_experiment writes datasets and the manifest to disk") {
  io::ConfigMap ov;
  ov["velocities_kmh"] = "20";
  ov["delta_list"] = "0.2";
  ExperimentConfig cfg = make_cfg("fig7_beta_surface", ov, 1);
  cfg.out_dir = "test_out_experiments_csv";
  REQUIRE(experiments::run_experiment(cfg) == 0);
  const std::string csv =
      io::read_text_file(cfg.out_dir + "/fig7_beta_surface.csv");
  CHECK(csv.rfind("velocity_kmh,delta,beta_avg\n", 0) == 0);
  // Header plus one data row.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  const nlohmann::json m = nlohmann::json::parse(
      io::read_text_file(cfg.out_dir + "/manifest.json"));
  CHECK(m.at("experiment") == "fig7_beta_surface");

  cfg.format = "json";
  cfg.out_dir = "test_out_experiments_json";
  REQUIRE(experiments::run_experiment(cfg) == 0);
  const nlohmann::json rec = nlohmann::json::parse(
      io::read_text_file(cfg.out_dir + "/fig7_beta_surface.json"));
  REQUIRE(rec.is_array());
  REQUIRE(rec.size() == 1);
  CHECK(rec[0].at("velocity_kmh").get<double>() == 20.0);
  CHECK(rec[0].at("beta_avg").get<double>() ==
        doctest::Approx(0.509566308142298).epsilon(5e-4));

  std::remove((std::string("test_out_experiments_csv/fig7_beta_surface.csv"))
                  .c_str());
  std::remove("test_out_experiments_csv/manifest.json");
  std::remove("test_out_experiments_json/fig7_beta_surface.json");
  std::remove("test_out_experiments_json/manifest.json");
}

TEST_CASE("run_experiment maps configuration mistakes to exit code 2") {
  ExperimentConfig cfg = make_cfg("no_such_experiment", {}, 100);
  cfg.out_dir = "test_out_experiments_err";
  CHECK(experiments::run_experiment(cfg) == 2);

  io::ConfigMap bad;
  bad["velocity_kmh"] = "-5";  // invalid parameter caught by validation
  cfg = make_cfg("fig3_outage", bad, 10);
  cfg.out_dir = "test_out_experiments_err";
  CHECK(experiments::run_experiment(cfg) == 2);
}
