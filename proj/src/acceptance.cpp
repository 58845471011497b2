#include "femtonet/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <vector>

#include <json.hpp>

#include "femtonet/analytics.hpp"
#include "femtonet/backoff.hpp"
#include "femtonet/channel.hpp"
#include "femtonet/codebook.hpp"
#include "femtonet/experiments.hpp"
#include "femtonet/geometry.hpp"
#include "femtonet/mathkit.hpp"
#include "femtonet/rng.hpp"
#include "femtonet/simulator.hpp"

namespace femtonet {
namespace acceptance {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return std::string(buf);
}

// Two-sided Kolmogorov-Smirnov distance between sorted samples and a CDF.
double ks_statistic(const std::vector<double>& sorted,
                    const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    worst = std::max(worst, std::fabs(f - (i + 1.0) / n));
    worst = std::max(worst, std::fabs(f - i / n));
  }
  return worst;
}

// Mean of the effective-power model at the given constants (2s = 1).
double model_mean(const analytics::DerivedConstants& k, int n_b) {
  return k.eta * k.eta * ((1.0 - k.delta) * (n_b - 1) + 1.0);
}

SystemParams delay_params(double snr_db) {
  SystemParams p = experiments::default_params();
  p.n_b = 2;
  p.n_f = 2;
  p.bits = 3;
  p.density = 0.0;
  const double ratio = p.pathloss.rho_f / p.pathloss.rho_m;
  p.pathloss.rho_m = std::pow(10.0, snr_db / 10.0) *
                     std::pow(p.user_distance, p.pathloss.alpha_m);
  p.pathloss.rho_f = p.pathloss.rho_m * ratio;
  return p;
}

SystemParams field_params(double distance) {
  SystemParams p = experiments::default_params();
  p.n_b = 4;
  p.n_f = 4;
  p.bits = 5;
  p.pathloss.d_min = 20.0;
  p.user_distance = distance;
  return p;
}

// ---------------------------------------------------------------- 1
CriterionResult check_no_interference_certainty(std::uint64_t seed) {
  CriterionResult r{1, "zero-density success probability is exactly one", false,
                    ""};
  RandomStream rng = RandomStream::derived(seed, 100);
  const int total = 100;
  int exact = 0;
  for (int i = 0; i < total; ++i) {
    SystemParams p = experiments::default_params();
    p.density = 0.0;
    p.n_b = 2 + static_cast<int>(rng.next_u64() % 5);
    p.n_f = p.n_b;
    p.bits = 1 + static_cast<int>(rng.next_u64() % 10);
    p.mobility.velocity = (1.0 + 119.0 * rng.uniform()) / 3.6;
    p.mobility.delay_frames = 1 + static_cast<int>(rng.next_u64() % 3);
    p.pathloss.alpha_m = 2.5 + 2.0 * rng.uniform();
    p.pathloss.alpha_f = 2.5 + 2.0 * rng.uniform();
    p.pathloss.rho_m = std::pow(10.0, 8.0 + 6.0 * rng.uniform());
    p.pathloss.rho_f = p.pathloss.rho_m * 3.1622776601683794e-4;
    p.user_distance = p.cell_radius * std::sqrt(rng.uniform_pos());
    p.sir_threshold = std::pow(10.0, -1.0 + 2.5 * rng.uniform());
    if (analytics::success_probability(p.sir_threshold, p) == 1.0) ++exact;
  }
  r.pass = exact == total;
  r.detail = fmt("%d/%d random parameter sets returned 1.0 bit-exactly", exact,
                 total);
  return r;
}

// ---------------------------------------------------------------- 2
CriterionResult check_effective_power_law(std::uint64_t seed) {
  CriterionResult r{2, "effective-power law vs quantized simulation (KS)",
                    false, ""};
  const std::vector<double> velocities = {10, 20, 30, 40, 50};
  const int trials = 100000;
  const double gate = 0.03;
  double worst = 0.0;
  std::string parts;
  bool all_ok = true;
  for (std::size_t vi = 0; vi < velocities.size(); ++vi) {
    SystemParams p = experiments::default_params();
    p.n_b = 4;
    p.bits = 6;
    p.density = 0.0;
    p.mobility.velocity = velocities[vi] / 3.6;
    const double eta = channel::correlation_coefficient(p.mobility);
    const analytics::DerivedConstants k = analytics::derive_constants(p);
    RandomStream rng = RandomStream::derived(seed, 200 + vi);
    std::vector<double> samples = simulator::detail::ordered_trial_values(
        trials, [&](int t) {
          RandomStream s = rng.substream(0, static_cast<std::uint64_t>(t));
          const Codebook cb = codebook::generate_rvq(p.n_b, p.bits, s);
          const ChannelVector h = channel::sample_channel(p.n_b, s);
          return eta * eta *
                 channel::effective_power(h,
                                          cb.vectors[codebook::quantize(h, cb)]);
        });
    std::sort(samples.begin(), samples.end());
    const double ks = ks_statistic(samples, [&](double z) {
      return analytics::effective_power_cdf(z, k, p.n_b);
    });
    worst = std::max(worst, ks);
    all_ok = all_ok && ks <= gate;
    parts += fmt("%s v%g: %.4f", parts.empty() ? "" : ", ", velocities[vi], ks);
  }
  r.pass = all_ok;
  r.detail =
      fmt("KS per speed [km/h] {%s}, worst %.4f (gate <= %.2f); the "
          "quantization-loss moment match leaves an irreducible shape gap",
          parts.c_str(), worst, gate);
  return r;
}

// ---------------------------------------------------------------- 3
CriterionResult check_outage_curve(std::uint64_t seed) {
  CriterionResult r{3, "field outage curve vs simulation", false, ""};
  const int points = 10;
  const int trials = 100000;
  const double gate = 0.05;
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double d = 40.0 + 180.0 * i / (points - 1);
    SystemParams p = experiments::default_params();
    p.user_distance = d;
    const double analytic =
        1.0 - analytics::success_probability(p.sir_threshold, p);
    RandomStream rng = RandomStream::derived(seed, 300 + i);
    const simulator::OutageEstimate est = simulator::estimate_outage(
        simulator::make_context(p), p.sir_threshold, trials, rng);
    worst = std::max(worst, std::fabs(est.outage - analytic));
  }
  r.pass = worst <= gate;
  r.detail = fmt(
      "max |analytic - empirical| outage = %.4f over 10 distances in "
      "[40, 220] m at 1e5 trials each (gate <= %.2f)",
      worst, gate);
  return r;
}

// ---------------------------------------------------------------- 4
CriterionResult check_laplace_transform(std::uint64_t seed) {
  CriterionResult r{4, "interference Laplace transform vs field simulation",
                    false, ""};
  const std::vector<double> thetas = {0.1, 1.0, 10.0};
  const std::vector<double> alphas = {3.0, 3.8, 4.0};
  const int trials = 20000;
  const double gate = 0.05;
  double worst = 0.0;
  int combo = 0;
  for (double theta : thetas) {
    for (double alpha : alphas) {
      const double df = 2.0 / alpha;
      const double cf = (2.0 * M_PI / alpha) * mathkit::gamma_fn(df) *
                        mathkit::gamma_fn(1.0 - df);
      // Density tuned so the analytic exponent is exactly 1/2.
      const double density = 0.5 / (cf * std::pow(theta, df));
      const double analytic =
          analytics::laplace_interference(theta, density, alpha);
      // Radius holding the truncated tail of the exponent below 1 percent.
      double radius = std::pow(
          density * 2.0 * M_PI * theta / (0.01 * (alpha - 2.0)),
          1.0 / (alpha - 2.0));
      radius = std::min(2000.0, std::max(20.0, radius));
      RandomStream rng = RandomStream::derived(seed, 400 + combo);
      const double mc =
          simulator::detail::ordered_trial_sum(trials, [&](int t) {
            RandomStream s = rng.substream(0, static_cast<std::uint64_t>(t));
            const InterfererField field =
                geometry::sample_ppp_disc(density, radius, 0.05, s);
            return std::exp(-theta *
                            geometry::interference_power(field, alpha));
          }) /
          trials;
      worst = std::max(worst, std::fabs(mc - analytic) / analytic);
      ++combo;
    }
  }
  r.pass = worst <= gate;
  r.detail = fmt(
      "max relative gap %.4f over 9 (theta, exponent) combos at 2e4 field "
      "draws each (gate <= %.2f)",
      worst, gate);
  return r;
}

// ---------------------------------------------------------------- 5
CriterionResult check_max_density(std::uint64_t) {
  CriterionResult r{5, "density limit self-consistency and closed form", false,
                    ""};
  SystemParams p = experiments::default_params();
  p.bits = 8;
  p.user_distance = 150.0;
  const analytics::DerivedConstants k = analytics::derive_constants(p);
  const std::vector<double> epsilons = {0.05, 0.1, 0.2};
  double worst_slack = 0.0;
  double worst_ratio = 0.0;
  std::string parts;
  for (double eps : epsilons) {
    const analytics::MaxDensityResult m =
        analytics::max_density(eps, p.sir_threshold, p, 1.0);
    const double achieved =
        analytics::success_probability(p.sir_threshold, k, m.exact);
    if (!m.capped)
      worst_slack = std::max(worst_slack, std::fabs(achieved - (1.0 - eps)));
    const double ratio = std::fabs(m.lambert - m.exact) / m.exact;
    worst_ratio = std::max(worst_ratio, ratio);
    parts += fmt("%s eps=%.2f: %.3f", parts.empty() ? "" : ",", eps, ratio);
  }
  const bool slack_ok = worst_slack <= 1e-6;
  const bool ratio_ok = worst_ratio <= 0.10;
  r.pass = slack_ok && ratio_ok;
  r.detail = fmt(
      "root-solve slack max %.2e (gate <= 1e-6)%s; closed-form relative error "
      "{%s }, worst %.3f (gate <= 0.10)%s at 8 feedback bits",
      worst_slack, slack_ok ? "" : " FAILED", parts.c_str(), worst_ratio,
      ratio_ok ? "" : " FAILED: the single-branch closed form collapses the "
                      "two-scale mixture and lands orders of magnitude low");
  return r;
}

// ---------------------------------------------------------------- 6
CriterionResult check_backoff_solvers(std::uint64_t) {
  CriterionResult r{6, "backoff solvers vs grid oracle", false, ""};
  const int grid = 2001;
  const double gate = 1e-3;
  double worst_delay = 0.0;
  for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
    SystemParams p = delay_params(snr);
    const analytics::DerivedConstants k = analytics::derive_constants(p);
    const double z = model_mean(k, p.n_b);
    const double exact = backoff::beta_star_delay(z, p).beta_star;
    const double oracle =
        backoff::beta_star_grid_oracle(z, p, false, grid).beta_star;
    worst_delay = std::max(worst_delay, std::fabs(exact - oracle));
  }
  double worst_field = 0.0;
  for (double d : {100.0, 175.0, 250.0, 325.0, 400.0}) {
    SystemParams p = field_params(d);
    const analytics::DerivedConstants k = analytics::derive_constants(p);
    const double z = model_mean(k, p.n_b);
    const double exact = backoff::beta_star_interference(z, p).beta_star;
    const double oracle =
        backoff::beta_star_grid_oracle(z, p, true, grid).beta_star;
    worst_field = std::max(worst_field, std::fabs(exact - oracle));
  }
  double worst_excess = -1.0;  // polynomial root must stay at or below exact
  SystemParams p5 = delay_params(5.0);
  for (double z : {1.0, 1.5, 1.875, 2.5, 3.5}) {
    const double poly = backoff::beta_star_delay_poly(z, p5).beta_star;
    const double exact = backoff::beta_star_delay(z, p5).beta_star;
    worst_excess = std::max(worst_excess, poly - exact);
  }
  r.pass = worst_delay <= gate && worst_field <= gate && worst_excess <= 1e-9;
  r.detail = fmt(
      "delay solver vs oracle max gap %.2e, field solver max gap %.2e "
      "(gate <= 1e-3); polynomial root minus exact max %.3e (must be <= 0)",
      worst_delay, worst_field, worst_excess);
  return r;
}

// ---------------------------------------------------------------- 7
CriterionResult check_goodput_dominance(std::uint64_t seed) {
  CriterionResult r{7, "backoff goodput dominance and throughput ceiling",
                    false, ""};
  const int trials = 100000;
  // In the interference-limited sweep the optimal backoff sits at the
  // boundary (no backoff), so the paired gain is a Monte Carlo zero; allow
  // sampling noise there.  The ceiling is a pathwise inequality and exact.
  double worst_gain = 1e9;      // min of (backoff - none); must be >= -1e-3
  double worst_ceiling = -1e9;  // max of (goodput - throughput); must be <= 1e-9
  int pt = 0;
  for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
    SystemParams p = delay_params(snr);
    const simulator::TrialContext ctx = simulator::make_context(p);
    RandomStream rng = RandomStream::derived(seed, 700 + pt++);
    const double none = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kNoBackoff, rng);
    const double exact = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kBackoffExact, rng);
    const double poly = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kBackoffPoly, rng);
    const double thr = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kThroughput, rng);
    worst_gain = std::min(worst_gain, exact - none);
    worst_ceiling = std::max({worst_ceiling, none - thr, exact - thr,
                              poly - thr});
  }
  for (double d : {100.0, 200.0, 300.0, 400.0}) {
    SystemParams p = field_params(d);
    const simulator::TrialContext ctx = simulator::make_context(p);
    RandomStream rng = RandomStream::derived(seed, 700 + pt++);
    const double none = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kNoBackoff, rng);
    const double exact = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kBackoffExact, rng);
    const double poly = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kBackoffPoly, rng);
    const double thr = simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kThroughput, rng);
    worst_gain = std::min(worst_gain, exact - none);
    worst_ceiling = std::max({worst_ceiling, none - thr, exact - thr,
                              poly - thr});
  }
  r.pass = worst_gain >= -1e-3 && worst_ceiling <= 1e-9;
  r.detail = fmt(
      "min paired goodput gain (backoff - none) %.4f bits (gate >= -1e-3), "
      "max goodput excess over throughput %.2e (must be <= 0), 9 operating "
      "points at 1e5 common-random trials",
      worst_gain, worst_ceiling);
  return r;
}

// ---------------------------------------------------------------- 8
CriterionResult check_beamforming_gain(std::uint64_t seed) {
  CriterionResult r{8, "limited-feedback gain over random beamforming", false,
                    ""};
  const int trials = 50000;
  std::vector<double> snrs, lf, rb;
  for (int i = 0; i < 7; ++i) {
    const double d = 100.0 + 50.0 * i;
    SystemParams p = field_params(d);
    const simulator::TrialContext ctx = simulator::make_context(p);
    RandomStream rng = RandomStream::derived(seed, 800 + i);
    lf.push_back(simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kThroughput, rng));
    rb.push_back(simulator::estimate_goodput(
        ctx, trials, simulator::GoodputMode::kRandomBeamforming, rng));
    snrs.push_back(p.snr_db());
  }
  // Distance sweeps run high SNR to low; flip to ascending SNR.
  std::reverse(snrs.begin(), snrs.end());
  std::reverse(lf.begin(), lf.end());
  std::reverse(rb.begin(), rb.end());
  const auto snr_at_rate = [&](const std::vector<double>& rate,
                               double target) {
    for (std::size_t i = 0; i + 1 < rate.size(); ++i) {
      const double a = rate[i], b = rate[i + 1];
      if ((a - target) * (b - target) <= 0.0 && a != b) {
        const double t = (target - a) / (b - a);
        return snrs[i] + t * (snrs[i + 1] - snrs[i]);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double lo = std::max(*std::min_element(lf.begin(), lf.end()),
                             *std::min_element(rb.begin(), rb.end()));
  const double hi = std::min(*std::max_element(lf.begin(), lf.end()),
                             *std::max_element(rb.begin(), rb.end()));
  double gap_sum = 0.0;
  int gaps = 0;
  for (double q : {0.35, 0.5, 0.65}) {
    const double target = lo + q * (hi - lo);
    const double s_lf = snr_at_rate(lf, target);
    const double s_rb = snr_at_rate(rb, target);
    if (std::isfinite(s_lf) && std::isfinite(s_rb)) {
      gap_sum += s_rb - s_lf;
      ++gaps;
    }
  }
  const double gap = gaps > 0 ? gap_sum / gaps : 0.0;
  r.pass = gaps == 3 && gap >= 3.5 && gap <= 6.5;
  r.detail = fmt(
      "mean horizontal rate-curve shift %.2f dB over %d mid-range rate "
      "targets (gate 3.5 .. 6.5 dB; four antennas, five feedback bits)",
      gap, gaps);
  return r;
}

// ---------------------------------------------------------------- 9
CriterionResult check_backoff_surface(std::uint64_t) {
  CriterionResult r{9, "average backoff trend over speed and quantizer gap",
                    false, ""};
  const std::vector<double> velocities = {20, 30, 40, 50, 60};
  const std::vector<double> deltas = {0.2, 0.35, 0.5, 0.65, 0.8};
  const int n_b = 4;
  const double rho_bar = std::pow(10.0, 1.0);  // 10 dB reference
  SystemParams base = experiments::default_params();
  double surface[5][5];
  for (std::size_t vi = 0; vi < velocities.size(); ++vi) {
    MobilityParams m = base.mobility;
    m.velocity = velocities[vi] / 3.6;
    const double eta = channel::correlation_coefficient(m);
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      const analytics::DerivedConstants k = analytics::derive_constants_raw(
          n_b, deltas[di], eta, base.pathloss.alpha_f, 1.0);
      const analytics::DerivedConstants kt = analytics::derive_constants_raw(
          n_b, deltas[di], 1.0, base.pathloss.alpha_f, 1.0);
      const double hi = analytics::effective_power_quantile(kt, n_b, 1.0 - 1e-8);
      surface[vi][di] = mathkit::integrate_adaptive(
          [&](double z) {
            return backoff::beta_star_delay_for_state(z, k, n_b, rho_bar)
                       .beta_star *
                   analytics::effective_power_pdf(z, kt, n_b);
          },
          1e-12, hi, 1e-6);
    }
  }
  const double tol = 1e-6;
  bool monotone = true;
  for (int di = 0; di < 5; ++di)
    for (int vi = 0; vi + 1 < 5; ++vi)
      monotone = monotone && surface[vi + 1][di] <= surface[vi][di] + tol;
  for (int vi = 0; vi < 5; ++vi)
    for (int di = 0; di + 1 < 5; ++di)
      monotone = monotone && surface[vi][di + 1] >= surface[vi][di] - tol;
  r.pass = monotone;
  r.detail = fmt(
      "5x5 mean-backoff surface monotone (down in speed, up in quantizer "
      "match) within 1e-6; corners %.4f %.4f / %.4f %.4f",
      surface[0][0], surface[0][4], surface[4][0], surface[4][4]);
  return r;
}

// ---------------------------------------------------------------- 10
std::string render_reduced_suite(std::uint64_t seed) {
  std::string blob;
  const auto append = [&blob](const experiments::ExperimentOutput& out) {
    blob += out.manifest_json;
    for (const auto& ds : out.datasets) blob += io::to_csv(ds.table);
  };
  experiments::ExperimentConfig c2;
  c2.experiment = "fig2_cdf";
  c2.seed = seed;
  c2.trials = 20000;
  c2.overrides = {{"velocities_kmh", "20"}, {"cdf_points", "128"}};
  append(experiments::build_experiment(c2));
  experiments::ExperimentConfig c3;
  c3.experiment = "fig3_outage";
  c3.seed = seed;
  c3.trials = 20000;
  c3.overrides = {{"sweep_points", "3"}};
  append(experiments::build_experiment(c3));
  experiments::ExperimentConfig c5;
  c5.experiment = "fig5_goodput_delay";
  c5.seed = seed;
  c5.trials = 20000;
  c5.overrides = {{"snr_db_list", "5,15"}};
  append(experiments::build_experiment(c5));
  return blob;
}

std::string with_worker_env(const char* value,
                            const std::function<std::string()>& fn) {
  const char* old = std::getenv("FEMTONET_THREADS");
  const std::string saved = old ? old : "";
  const bool had = old != nullptr;
  ::setenv("FEMTONET_THREADS", value, 1);
  std::string out = fn();
  if (had)
    ::setenv("FEMTONET_THREADS", saved.c_str(), 1);
  else
    ::unsetenv("FEMTONET_THREADS");
  return out;
}

CriterionResult check_determinism(std::uint64_t seed) {
  CriterionResult r{10, "bit-identical reruns across worker counts", false,
                    ""};
  const std::string once =
      with_worker_env("1", [&] { return render_reduced_suite(seed); });
  const std::string again =
      with_worker_env("1", [&] { return render_reduced_suite(seed); });
  const std::string wide =
      with_worker_env("4", [&] { return render_reduced_suite(seed); });
  const bool rerun_ok = once == again;
  const bool width_ok = once == wide;
  r.pass = rerun_ok && width_ok;
  r.detail = fmt(
      "reduced suite (%zu bytes of manifests+CSV): rerun identical=%s, "
      "1-vs-4 workers identical=%s",
      once.size(), rerun_ok ? "yes" : "NO", width_ok ? "yes" : "NO");
  return r;
}

}  // namespace

std::vector<CriterionResult> run_all(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  out.push_back(check_no_interference_certainty(seed));
  out.push_back(check_effective_power_law(seed));
  out.push_back(check_outage_curve(seed));
  out.push_back(check_laplace_transform(seed));
  out.push_back(check_max_density(seed));
  out.push_back(check_backoff_solvers(seed));
  out.push_back(check_goodput_dominance(seed));
  out.push_back(check_beamforming_gain(seed));
  out.push_back(check_backoff_surface(seed));
  out.push_back(check_determinism(seed));
  return out;
}

std::string report_json(const std::vector<CriterionResult>& results) {
  nlohmann::json j;
  j["criteria"] = nlohmann::json::array();
  int passed = 0;
  for (const auto& r : results) {
    j["criteria"].push_back({{"id", r.id},
                             {"name", r.name},
                             {"pass", r.pass},
                             {"detail", r.detail}});
    if (r.pass) ++passed;
  }
  j["passed"] = passed;
  j["total"] = static_cast<int>(results.size());
  return j.dump(1) + "\n";
}

}  // namespace acceptance
}  // namespace femtonet
