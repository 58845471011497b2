#include "femtonet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "femtonet/acceptance.hpp"
#include "femtonet/analytics.hpp"
#include "femtonet/backoff.hpp"
#include "femtonet/channel.hpp"
#include "femtonet/codebook.hpp"
#include "femtonet/geometry.hpp"
#include "femtonet/mathkit.hpp"
#include "femtonet/simulator.hpp"

namespace femtonet {
namespace experiments {

namespace {

constexpr const char* kVersion = "1.0.0";

// Disjoint stream families per role so no experiment reuses another's draws.
constexpr std::uint64_t kPointBase = 100;
constexpr std::uint64_t kRhoBarBase = 500;

std::vector<double> parse_list(const io::ConfigMap& cfg,
                               const std::string& key,
                               std::vector<double> fallback) {
  if (!io::config_has(cfg, key)) return fallback;
  const std::string raw = io::config_string(cfg, key, "");
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      out.push_back(v);
    } catch (const std::exception&) {
      throw io::ConfigError("config key '" + key + "': cannot parse '" +
                            item + "' as a number");
    }
  }
  if (out.empty())
    throw io::ConfigError("config key '" + key + "': empty list");
  return out;
}

nlohmann::json params_json(const SystemParams& p) {
  nlohmann::json j;
  j["n_b"] = p.n_b;
  j["n_f"] = p.n_f;
  j["bits"] = p.bits;
  j["alpha_m"] = p.pathloss.alpha_m;
  j["alpha_f"] = p.pathloss.alpha_f;
  j["rho_m"] = p.pathloss.rho_m;
  j["rho_f"] = p.pathloss.rho_f;
  j["wall_loss_db"] = p.pathloss.wall_loss_db;
  j["d_min_m"] = p.pathloss.d_min;
  j["velocity_kmh"] = p.mobility.velocity * 3.6;
  j["carrier_freq_hz"] = p.mobility.carrier_freq;
  j["symbol_duration_s"] = p.mobility.symbol_duration;
  j["delay_frames"] = p.mobility.delay_frames;
  j["density_per_m2"] = p.density;
  j["n_femtocells"] = femtocell_count(p.density, p.cell_radius);
  j["cell_radius_m"] = p.cell_radius;
  j["user_distance_m"] = p.user_distance;
  j["sir_threshold_db"] = 10.0 * std::log10(p.sir_threshold);
  j["snr_db"] = p.snr_db();
  j["correlation"] = channel::correlation_coefficient(p.mobility);
  return j;
}

std::string build_manifest(const ExperimentConfig& cfg, const SystemParams& p,
                           const SweepSpec& sweep,
                           const std::vector<Dataset>& datasets) {
  nlohmann::json j;
  j["tool"] = "femtonet";
  j["version"] = kVersion;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["format"] = cfg.format;
  j["params"] = params_json(p);
  j["sweep"] = {{"axis", sweep.axis},
                {"values", sweep.values},
                {"trials_per_point", sweep.trials_per_point},
                {"seed", sweep.seed}};
  nlohmann::json names = nlohmann::json::array();
  for (const auto& d : datasets) names.push_back(d.name);
  j["datasets"] = names;
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [k, v] : cfg.overrides) overrides[k] = v;
  j["config_overrides"] = overrides;
  return j.dump(1) + "\n";
}

// Sets the macro gain so the mean SNR at the current user distance is
// `snr_db`, preserving the femto-to-macro gain ratio.
void set_snr_db(SystemParams& p, double snr_db) {
  const double ratio = p.pathloss.rho_f / p.pathloss.rho_m;
  p.pathloss.rho_m = std::pow(10.0, snr_db / 10.0) *
                     std::pow(p.user_distance, p.pathloss.alpha_m);
  p.pathloss.rho_f = p.pathloss.rho_m * ratio;
}

// ------------------------------------------------------------------ fig2
void build_fig2(const ExperimentConfig& cfg, SystemParams p,
                ExperimentOutput& out, SweepSpec& sweep) {
  p.n_b = io::config_int(cfg.overrides, "n_b", 4);
  p.bits = io::config_int(cfg.overrides, "bits", 6);
  p.density = 0.0;
  const std::vector<double> velocities = parse_list(
      cfg.overrides, "velocities_kmh", {10.0, 20.0, 30.0, 40.0, 50.0});
  const int points =
      std::max(2, io::config_int(cfg.overrides, "cdf_points", 512));
  sweep = {"velocity", velocities, cfg.trials, cfg.seed};

  for (std::size_t vi = 0; vi < velocities.size(); ++vi) {
    SystemParams pv = p;
    pv.mobility.velocity = velocities[vi] / 3.6;
    pv.validate();
    const double eta = channel::correlation_coefficient(pv.mobility);
    const analytics::DerivedConstants k = analytics::derive_constants(pv);
    RandomStream rng = RandomStream::derived(cfg.seed, kPointBase + vi);
    std::vector<double> samples = simulator::detail::ordered_trial_values(
        cfg.trials, [&](int t) {
          RandomStream r = rng.substream(0, static_cast<std::uint64_t>(t));
          const Codebook cb = codebook::generate_rvq(pv.n_b, pv.bits, r);
          const ChannelVector h = channel::sample_channel(pv.n_b, r);
          const double z =
              channel::effective_power(h, cb.vectors[codebook::quantize(h, cb)]);
          return eta * eta * z;
        });
    std::sort(samples.begin(), samples.end());
    Dataset ds;
    ds.name = "fig2_cdf_v" + std::to_string(static_cast<int>(velocities[vi]));
    ds.table.columns = {"z", "empirical_cdf", "analytic_cdf"};
    const std::size_t n = samples.size();
    for (int j = 0; j < points; ++j) {
      const std::size_t idx =
          static_cast<std::size_t>(static_cast<double>(j) * (n - 1) /
                                   (points - 1));
      const double z = samples[idx];
      ds.table.add_row({z, static_cast<double>(idx + 1) / n,
                        analytics::effective_power_cdf(z, k, pv.n_b)});
    }
    out.datasets.push_back(std::move(ds));
  }
}

// ------------------------------------------------------------------ fig3
void build_fig3(const ExperimentConfig& cfg, SystemParams p,
                ExperimentOutput& out, SweepSpec& sweep) {
  p.n_b = io::config_int(cfg.overrides, "n_b", 4);
  p.n_f = io::config_int(cfg.overrides, "n_f", 4);
  p.bits = io::config_int(cfg.overrides, "bits", 5);
  const double lo = io::config_double(cfg.overrides, "sweep_start_m", 40.0);
  const double hi = io::config_double(cfg.overrides, "sweep_stop_m", 220.0);
  const int n = std::max(2, io::config_int(cfg.overrides, "sweep_points", 10));
  std::vector<double> distances(n);
  for (int i = 0; i < n; ++i)
    distances[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  sweep = {"distance", distances, cfg.trials, cfg.seed};

  Dataset ds;
  ds.name = "fig3_outage";
  ds.table.columns = {"distance_m", "snr_db", "outage_analytic",
                      "outage_empirical", "half_width_95"};
  for (std::size_t i = 0; i < distances.size(); ++i) {
    SystemParams pd = p;
    pd.user_distance = distances[i];
    pd.validate();
    const double analytic =
        1.0 - analytics::success_probability(pd.sir_threshold, pd);
    RandomStream rng = RandomStream::derived(cfg.seed, kPointBase + i);
    const simulator::OutageEstimate est = simulator::estimate_outage(
        simulator::make_context(pd), pd.sir_threshold, cfg.trials, rng);
    ds.table.add_row({distances[i], pd.snr_db(), analytic, est.outage,
                      est.half_width});
  }
  out.datasets.push_back(std::move(ds));
}

// ------------------------------------------------------------------ fig4
void build_fig4(const ExperimentConfig& cfg, SystemParams p,
                ExperimentOutput& out, SweepSpec& sweep) {
  p.n_b = io::config_int(cfg.overrides, "n_b", 4);
  const std::vector<double> bits_list =
      parse_list(cfg.overrides, "bits_list", {4.0, 6.0, 8.0, 10.0});
  const std::vector<double> distances = parse_list(
      cfg.overrides, "distances_m", {100.0, 150.0, 200.0, 250.0, 300.0});
  const double epsilon = io::config_double(cfg.overrides, "epsilon", 0.1);
  const double cap = io::config_double(cfg.overrides, "density_cap", 1.0);
  const bool user_avg = io::config_int(cfg.overrides, "user_average", 0) != 0;
  sweep = {"bits", bits_list, 1, cfg.seed};

  Dataset exact_ds, closed_ds;
  exact_ds.name = "fig4_density";
  exact_ds.table.columns = {"snr_db", "bits", "max_femtocells"};
  closed_ds.name = "fig4_density_closed_form";
  closed_ds.table.columns = {"snr_db", "bits", "max_femtocells"};
  for (double d : distances) {
    for (double b : bits_list) {
      SystemParams pb = p;
      pb.user_distance = d;
      pb.bits = static_cast<int>(b);
      pb.validate();
      const analytics::MaxDensityResult r =
          analytics::max_density(epsilon, pb.sir_threshold, pb, cap);
      exact_ds.table.add_row(
          {pb.snr_db(), b, femtocell_count(r.exact, pb.cell_radius)});
      closed_ds.table.add_row(
          {pb.snr_db(), b, femtocell_count(r.lambert, pb.cell_radius)});
    }
  }
  out.datasets.push_back(std::move(exact_ds));
  out.datasets.push_back(std::move(closed_ds));

  if (user_avg) {
    Dataset avg_ds;
    avg_ds.name = "fig4_user_avg";
    avg_ds.table.columns = {"bits", "max_femtocells_user_avg"};
    constexpr int kUsers = 1000;
    for (double b : bits_list) {
      double acc = 0.0;
      for (int u = 0; u < kUsers; ++u) {
        SystemParams pb = p;
        // Disc-uniform quantile midpoint radii.
        pb.user_distance =
            p.cell_radius * std::sqrt((u + 0.5) / kUsers);
        pb.bits = static_cast<int>(b);
        const analytics::MaxDensityResult r =
            analytics::max_density(epsilon, pb.sir_threshold, pb, cap);
        acc += femtocell_count(r.exact, pb.cell_radius);
      }
      avg_ds.table.add_row({b, acc / kUsers});
    }
    out.datasets.push_back(std::move(avg_ds));
  }
}

// ------------------------------------------------------------------ fig5
void build_fig5(const ExperimentConfig& cfg, SystemParams p,
                ExperimentOutput& out, SweepSpec& sweep) {
  p.n_b = io::config_int(cfg.overrides, "n_b", 2);
  p.n_f = io::config_int(cfg.overrides, "n_f", 2);
  p.bits = io::config_int(cfg.overrides, "bits", 3);
  p.density = 0.0;
  const std::vector<double> snrs = parse_list(
      cfg.overrides, "snr_db_list", {0.0, 5.0, 10.0, 15.0, 20.0});
  sweep = {"snr", snrs, cfg.trials, cfg.seed};

  Dataset ds;
  ds.name = "fig5_goodput_delay";
  ds.table.columns = {"snr_db",
                      "goodput_no_backoff_bps_hz",
                      "goodput_backoff_exact_bps_hz",
                      "goodput_backoff_poly_bps_hz",
                      "throughput_bps_hz",
                      "analytic_no_backoff_bps_hz",
                      "analytic_backoff_exact_bps_hz",
                      "analytic_backoff_poly_bps_hz",
                      "analytic_tx_rate_bps_hz"};
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    SystemParams ps = p;
    set_snr_db(ps, snrs[i]);
    ps.validate();
    const simulator::TrialContext ctx = simulator::make_context(ps);
    RandomStream rng = RandomStream::derived(cfg.seed, kPointBase + i);
    // One stream for all modes: common random numbers pair the comparisons.
    const double g_none = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kNoBackoff, rng);
    const double g_exact = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kBackoffExact, rng);
    const double g_poly = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kBackoffPoly, rng);
    const double thr = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kThroughput, rng);
    ds.table.add_row(
        {snrs[i], g_none, g_exact, g_poly, thr,
         analytics::avg_goodput_analytic(ps, analytics::GoodputMode::kNoBackoff),
         analytics::avg_goodput_analytic(ps,
                                         analytics::GoodputMode::kBackoffExact),
         analytics::avg_goodput_analytic(ps,
                                         analytics::GoodputMode::kBackoffPoly),
         analytics::avg_goodput_analytic(ps,
                                         analytics::GoodputMode::kThroughput)});
  }
  out.datasets.push_back(std::move(ds));
}

// ------------------------------------------------------------------ fig6
void build_fig6(const ExperimentConfig& cfg, SystemParams p,
                ExperimentOutput& out, SweepSpec& sweep) {
  p.n_b = io::config_int(cfg.overrides, "n_b", 4);
  p.n_f = io::config_int(cfg.overrides, "n_f", 4);
  p.bits = io::config_int(cfg.overrides, "bits", 5);
  p.pathloss.d_min = io::config_double(cfg.overrides, "d_min_m", 20.0);
  const std::vector<double> distances =
      parse_list(cfg.overrides, "distances_m",
                 {100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0});
  const int rho_trials =
      io::config_int(cfg.overrides, "rho_bar_trials", 1000000);
  sweep = {"distance", distances, cfg.trials, cfg.seed};

  Dataset ds;
  ds.name = "fig6_goodput_interference";
  ds.table.columns = {"distance_m",
                      "snr_db",
                      "goodput_no_backoff_bps_hz",
                      "goodput_backoff_exact_bps_hz",
                      "goodput_backoff_poly_bps_hz",
                      "throughput_bps_hz",
                      "random_beamforming_bps_hz",
                      "analytic_no_backoff_bps_hz",
                      "analytic_backoff_exact_bps_hz"};
  for (std::size_t i = 0; i < distances.size(); ++i) {
    SystemParams pd = p;
    pd.user_distance = distances[i];
    pd.validate();
    RandomStream rho_rng = RandomStream::derived(cfg.seed, kRhoBarBase + i);
    const geometry::RhoBarEstimate rho =
        geometry::estimate_rho_bar(pd, rho_trials, rho_rng);
    const simulator::TrialContext ctx =
        simulator::make_context(pd, rho.rho_bar);
    RandomStream rng = RandomStream::derived(cfg.seed, kPointBase + i);
    const double g_none = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kNoBackoff, rng);
    const double g_exact = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kBackoffExact, rng);
    const double g_poly = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kBackoffPoly, rng);
    const double thr = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kThroughput, rng);
    const double rb = simulator::estimate_goodput(
        ctx, cfg.trials, simulator::GoodputMode::kRandomBeamforming, rng);
    ds.table.add_row(
        {distances[i], pd.snr_db(), g_none, g_exact, g_poly, thr, rb,
         analytics::avg_goodput_analytic(pd, analytics::GoodputMode::kNoBackoff),
         analytics::avg_goodput_analytic(
             pd, analytics::GoodputMode::kBackoffExact)});
  }
  out.datasets.push_back(std::move(ds));
}

// ------------------------------------------------------------------ fig7
void build_fig7(const ExperimentConfig& cfg, SystemParams p,
                ExperimentOutput& out, SweepSpec& sweep) {
  const int n_b = io::config_int(cfg.overrides, "n_b", 4);
  const std::vector<double> velocities = parse_list(
      cfg.overrides, "velocities_kmh", {20.0, 30.0, 40.0, 50.0, 60.0});
  const std::vector<double> deltas =
      parse_list(cfg.overrides, "delta_list", {0.2, 0.35, 0.5, 0.65, 0.8});
  const double snr_db = io::config_double(cfg.overrides, "snr_db", 10.0);
  const double rho_bar = std::pow(10.0, snr_db / 10.0);
  sweep = {"velocity", velocities, 1, cfg.seed};

  Dataset ds;
  ds.name = "fig7_beta_surface";
  ds.table.columns = {"velocity_kmh", "delta", "beta_avg"};
  for (double v : velocities) {
    MobilityParams m = p.mobility;
    m.velocity = v / 3.6;
    const double eta = channel::correlation_coefficient(m);
    for (double delta : deltas) {
      const analytics::DerivedConstants k = analytics::derive_constants_raw(
          n_b, delta, eta, p.pathloss.alpha_f, 1.0);
      const analytics::DerivedConstants kt = analytics::derive_constants_raw(
          n_b, delta, 1.0, p.pathloss.alpha_f, 1.0);
      const double hi =
          analytics::effective_power_quantile(kt, n_b, 1.0 - 1e-8);
      const double beta_avg = mathkit::integrate_adaptive(
          [&](double z) {
            return backoff::beta_star_delay_for_state(z, k, n_b, rho_bar)
                       .beta_star *
                   analytics::effective_power_pdf(z, kt, n_b);
          },
          1e-12, hi, 1e-6);
      ds.table.add_row({v, delta, beta_avg});
    }
  }
  out.datasets.push_back(std::move(ds));
}

}  // namespace

SystemParams default_params() {
  SystemParams p;
  p.density = density_from_count(95.0, p.cell_radius);
  return p;
}

double femtocell_count(double density, double cell_radius) {
  return density * M_PI * cell_radius * cell_radius;
}

double density_from_count(double count, double cell_radius) {
  return count / (M_PI * cell_radius * cell_radius);
}

SystemParams params_from_config(const io::ConfigMap& cfg) {
  SystemParams p = default_params();
  p.n_b = io::config_int(cfg, "n_b", p.n_b);
  p.n_f = io::config_int(cfg, "n_f", p.n_f);
  p.bits = io::config_int(cfg, "bits", p.bits);
  p.pathloss.alpha_m = io::config_double(cfg, "alpha_m", p.pathloss.alpha_m);
  p.pathloss.alpha_f = io::config_double(cfg, "alpha_f", p.pathloss.alpha_f);
  p.pathloss.rho_m = io::config_double(cfg, "rho_m", p.pathloss.rho_m);
  const double ratio_db = io::config_double(cfg, "rho_ratio_db", -35.0);
  p.pathloss.rho_f = p.pathloss.rho_m * std::pow(10.0, ratio_db / 10.0);
  p.pathloss.wall_loss_db =
      io::config_double(cfg, "wall_loss_db", p.pathloss.wall_loss_db);
  p.pathloss.d_min = io::config_double(cfg, "d_min_m", p.pathloss.d_min);
  p.mobility.velocity =
      io::config_double(cfg, "velocity_kmh", p.mobility.velocity * 3.6) / 3.6;
  p.mobility.carrier_freq =
      io::config_double(cfg, "carrier_freq_hz", p.mobility.carrier_freq);
  p.mobility.symbol_duration =
      io::config_double(cfg, "symbol_duration_s", p.mobility.symbol_duration);
  p.mobility.delay_frames =
      io::config_int(cfg, "delay_frames", p.mobility.delay_frames);
  p.cell_radius = io::config_double(cfg, "cell_radius_m", p.cell_radius);
  if (io::config_has(cfg, "density")) {
    p.density = io::config_double(cfg, "density", p.density);
  } else if (io::config_has(cfg, "n_femtocells")) {
    p.density = density_from_count(
        io::config_double(cfg, "n_femtocells", 95.0), p.cell_radius);
  }
  p.user_distance =
      io::config_double(cfg, "user_distance_m", p.user_distance);
  if (io::config_has(cfg, "sir_threshold_db"))
    p.sir_threshold =
        std::pow(10.0, io::config_double(cfg, "sir_threshold_db", 5.0) / 10.0);
  return p;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "fig2_cdf",           "fig3_outage",
      "fig4_density",       "fig5_goodput_delay",
      "fig6_goodput_interference", "fig7_beta_surface",
      "validate_all"};
  return names;
}

ExperimentOutput build_experiment(const ExperimentConfig& cfg) {
  if (std::find(experiment_names().begin(), experiment_names().end(),
                cfg.experiment) == experiment_names().end())
    throw io::ConfigError("unknown experiment '" + cfg.experiment + "'");
  if (cfg.format != "csv" && cfg.format != "json")
    throw io::ConfigError("format must be csv or json, got '" + cfg.format +
                          "'");
  if (cfg.trials < 1) throw io::ConfigError("trials must be >= 1");

  ExperimentOutput out;
  SystemParams p = params_from_config(cfg.overrides);
  SweepSpec sweep{"none", {0.0}, cfg.trials, cfg.seed};

  if (cfg.experiment == "fig2_cdf") {
    build_fig2(cfg, p, out, sweep);
  } else if (cfg.experiment == "fig3_outage") {
    build_fig3(cfg, p, out, sweep);
  } else if (cfg.experiment == "fig4_density") {
    build_fig4(cfg, p, out, sweep);
  } else if (cfg.experiment == "fig5_goodput_delay") {
    build_fig5(cfg, p, out, sweep);
  } else if (cfg.experiment == "fig6_goodput_interference") {
    build_fig6(cfg, p, out, sweep);
  } else if (cfg.experiment == "fig7_beta_surface") {
    build_fig7(cfg, p, out, sweep);
  } else {  // validate_all
    const std::vector<acceptance::CriterionResult> results =
        acceptance::run_all(cfg.seed);
    out.report_json = acceptance::report_json(results);
    out.accepted = std::all_of(results.begin(), results.end(),
                               [](const auto& r) { return r.pass; });
    Dataset ds;
    ds.name = "validate_all_summary";
    ds.table.columns = {"criterion", "pass"};
    for (const auto& r : results)
      ds.table.add_row({static_cast<double>(r.id), r.pass ? 1.0 : 0.0});
    out.datasets.push_back(std::move(ds));
  }

  out.manifest_json = build_manifest(cfg, p, sweep, out.datasets);
  return out;
}

int run_experiment(const ExperimentConfig& cfg) {
  try {
    const ExperimentOutput out = build_experiment(cfg);
    io::ensure_directory(cfg.out_dir);
    for (const auto& ds : out.datasets) {
      const std::string ext = cfg.format == "csv" ? ".csv" : ".json";
      const std::string body = cfg.format == "csv"
                                   ? io::to_csv(ds.table)
                                   : io::to_json_records(ds.table);
      io::write_text_file(cfg.out_dir + "/" + ds.name + ext, body);
    }
    io::write_text_file(cfg.out_dir + "/manifest.json", out.manifest_json);
    if (!out.report_json.empty())
      io::write_text_file(cfg.out_dir + "/report.json", out.report_json);
    return out.accepted ? 0 : 3;
  } catch (const io::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const io::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid parameters: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 4;
  }
}

}  // namespace experiments
}  // namespace femtonet
