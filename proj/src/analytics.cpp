#include "femtonet/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "femtonet/backoff.hpp"
#include "femtonet/channel.hpp"
#include "femtonet/codebook.hpp"
#include "femtonet/geometry.hpp"
#include "femtonet/mathkit.hpp"

namespace femtonet {
namespace analytics {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

DerivedConstants derive_constants_raw(int n_b, double delta, double eta,
                                      double alpha_f, double q_d) {
  if (n_b < 2) throw std::domain_error("derive_constants: n_b must be >= 2");
  if (!(delta > 0.0) || delta >= 1.0)
    throw std::domain_error("derive_constants: delta must be in (0, 1)");
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("derive_constants: eta must be in (0, 1]");
  if (!(alpha_f > 2.0))
    throw std::domain_error("derive_constants: alpha_f must be > 2");

  DerivedConstants k;
  k.n_b = n_b;
  k.eta = eta;
  k.delta = delta;
  k.delta_f = 2.0 / alpha_f;
  k.q_d = q_d;
  const double s = kChiSquareScale;
  k.kappa1 = 2.0 * eta * eta * (1.0 - delta) * s;
  k.kappa2 = 2.0 * eta * eta * s;
  k.c2 = std::pow(1.0 / delta, n_b - 1);
  k.c1 = (1.0 - delta) * k.c2;

  double geo = 0.0;  // sum_{i=0}^{n_b-2} delta^i
  for (int i = 0; i <= n_b - 2; ++i) geo += std::pow(delta, i);
  k.a2 = -k.c1 * geo;

  // a1: alternating factorial-weighted series over the mixture orders; empty
  // for n_b = 2.
  double a1 = 0.0;
  for (int i = 1; i <= n_b - 2; ++i) {
    for (int l = 0; l < i; ++l) {
      const int kk = i - l;
      double prod = 1.0;
      for (int m = 0; m < kk; ++m) prod *= (k.delta_f - m);
      const double sign = (kk % 2 == 0) ? 1.0 : -1.0;
      a1 += std::pow(delta, i) / factorial(kk) * sign * prod;
    }
  }
  k.a1 = k.c1 * a1;

  k.c_f = (2.0 * M_PI / alpha_f) * mathkit::gamma_fn(k.delta_f) *
          mathkit::gamma_fn(1.0 - k.delta_f);

  // Internal consistency: a2 + c2 = 1 is a geometric-series identity; a
  // violation means the constants were assembled wrong.
  if (std::abs(k.a2 + k.c2 - 1.0) > 1e-9 * std::max(1.0, k.c2))
    throw NumericError("derive_constants: a2 + c2 != 1");
  return k;
}

DerivedConstants derive_constants(const SystemParams& p) {
  p.validate();
  const double delta = codebook::gersho_delta(p.n_b, p.bits);
  const double eta = channel::correlation_coefficient(p.mobility);
  const double q_d = geometry::pathloss_ratio(p.user_distance, p.pathloss);
  return derive_constants_raw(p.n_b, delta, eta, p.pathloss.alpha_f, q_d);
}

double effective_power_cdf(double z, const DerivedConstants& k, int n_b) {
  if (z < 0.0) throw std::domain_error("effective_power_cdf: z < 0");
  if (z == 0.0) return 0.0;
  double sum = 0.0;
  for (int i = 0; i <= n_b - 2; ++i) {
    const double di = std::pow(k.delta, i);
    for (int l = 0; l <= i; ++l) {
      const int kk = i - l;
      sum += di / factorial(kk) * std::pow(z / k.kappa1, kk);
    }
  }
  const double v = 1.0 - k.c2 * std::exp(-z / k.kappa2) +
                   k.c1 * std::exp(-z / k.kappa1) * sum;
  return std::clamp(v, 0.0, 1.0);
}

double effective_power_pdf(double z, const DerivedConstants& k, int n_b) {
  if (z < 0.0) throw std::domain_error("effective_power_pdf: z < 0");
  if (z == 0.0) return effective_power_pdf(1e-300, k, n_b);
  double s0 = 0.0;  // the CDF's inner sum
  double s1 = 0.0;  // its term-wise derivative numerator
  for (int i = 0; i <= n_b - 2; ++i) {
    const double di = std::pow(k.delta, i);
    for (int l = 0; l <= i; ++l) {
      const int kk = i - l;
      s0 += di / factorial(kk) * std::pow(z / k.kappa1, kk);
      if (kk >= 1) s1 += di / factorial(kk - 1) * std::pow(z / k.kappa1, kk - 1);
    }
  }
  const double v = (k.c2 / k.kappa2) * std::exp(-z / k.kappa2) +
                   k.c1 * std::exp(-z / k.kappa1) * (s1 - s0) / k.kappa1;
  return std::max(0.0, v);
}

double ccdf_no_interference(double z, const DerivedConstants& k, int n_b) {
  if (z < 0.0) throw std::domain_error("ccdf_no_interference: z < 0");
  return 1.0 - effective_power_cdf(z, k, n_b);
}

double success_probability(double upsilon, const DerivedConstants& k,
                           double density) {
  if (!(upsilon > 0.0))
    throw std::domain_error("success_probability: upsilon must be > 0");
  if (density < 0.0)
    throw std::domain_error("success_probability: density < 0");
  if (density == 0.0) return 1.0;
  const double w1 =
      density * k.c_f * std::pow(upsilon * k.q_d / k.kappa1, k.delta_f);
  const double w2 =
      density * k.c_f * std::pow(upsilon * k.q_d / k.kappa2, k.delta_f);
  const double p =
      (k.a1 * w1 + k.a2) * std::exp(-w1) + k.c2 * std::exp(-w2);
  return std::clamp(p, 0.0, 1.0);
}

double success_probability(double upsilon, const SystemParams& p) {
  if (p.density == 0.0) {
    if (!(upsilon > 0.0))
      throw std::domain_error("success_probability: upsilon must be > 0");
    return 1.0;  // exact: the expansion coefficients satisfy a2 + c2 = 1
  }
  return success_probability(upsilon, derive_constants(p), p.density);
}

bool expansion_valid(double upsilon, const DerivedConstants& k,
                     double density) {
  const double w1 =
      density * k.c_f * std::pow(upsilon * k.q_d / k.kappa1, k.delta_f);
  return w1 <= 1.0;
}

double laplace_interference(double theta, double density, double alpha_f) {
  if (theta < 0.0) throw std::domain_error("laplace_interference: theta < 0");
  if (density < 0.0)
    throw std::domain_error("laplace_interference: density < 0");
  if (!(alpha_f > 2.0))
    throw std::domain_error("laplace_interference: alpha_f must be > 2");
  if (theta == 0.0 || density == 0.0) return 1.0;
  const double df = 2.0 / alpha_f;
  const double cf =
      (2.0 * M_PI / alpha_f) * mathkit::gamma_fn(df) * mathkit::gamma_fn(1.0 - df);
  return std::exp(-density * cf * std::pow(theta, df));
}

MaxDensityResult max_density(double epsilon, double upsilon,
                             const SystemParams& p, double density_cap) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::domain_error("max_density: epsilon must be in (0, 1)");
  if (!(upsilon > 0.0))
    throw std::domain_error("max_density: upsilon must be > 0");
  if (!(density_cap > 0.0))
    throw std::domain_error("max_density: density_cap must be > 0");
  const DerivedConstants k = derive_constants(p);
  const double target = 1.0 - epsilon;

  auto prob_at = [&](double lam) {
    return success_probability(upsilon, k, lam);
  };
  if (prob_at(0.0) < target)
    throw NumericError("max_density: target unreachable at density 0");

  MaxDensityResult out;
  if (prob_at(density_cap) >= target) {
    out.exact = density_cap;
    out.capped = true;
  } else {
    out.exact = mathkit::find_root_bracketed(
        [&](double lam) { return prob_at(lam) - target; }, 0.0, density_cap,
        1e-14, 1e-18);
  }

  // Closed form with both scales merged onto kappa1. Evaluate both W
  // branches, keep nonnegative candidates meeting the target, take the
  // largest; candidates above the cap clip to the cap.
  const double theta =
      k.c_f * std::pow(upsilon * k.q_d / k.kappa1, k.delta_f);
  double lambert = -1.0;
  if (std::abs(k.a1) < 1e-300) {
    lambert = -std::log(target) / theta;
  } else {
    const double shift = (k.a2 + k.c2) / k.a1;
    const double x = -target / (k.a1 * std::exp(shift));
    for (auto branch :
         {mathkit::LambertBranch::principal, mathkit::LambertBranch::lower}) {
      if (branch == mathkit::LambertBranch::lower &&
          (x < -std::exp(-1.0) || x >= 0.0))
        continue;
      if (x < -std::exp(-1.0)) continue;
      double w;
      try {
        w = mathkit::lambert_w(x, branch);
      } catch (const std::exception&) {
        continue;
      }
      const double cand = (w + shift) / (-theta);
      if (cand < 0.0) continue;
      if (prob_at(cand) + 1e-12 < target) continue;
      lambert = std::max(lambert, cand);
    }
  }
  if (lambert < 0.0) lambert = 0.0;
  out.lambert = std::min(lambert, density_cap);
  return out;
}

double effective_power_quantile(const DerivedConstants& k, int n_b,
                                double prob) {
  if (!(prob > 0.0) || !(prob < 1.0))
    throw std::domain_error("effective_power_quantile: prob must be in (0,1)");
  double hi = k.kappa2;
  while (effective_power_cdf(hi, k, n_b) < prob) {
    hi *= 2.0;
    if (hi > 1e12)
      throw NumericError("effective_power_quantile: no bracket");
  }
  return mathkit::find_root_bracketed(
      [&](double z) { return effective_power_cdf(z, k, n_b) - prob; }, 0.0,
      hi, 1e-14, 1e-12);
}

double avg_goodput_analytic(const SystemParams& p, GoodputMode mode,
                            double fixed_beta) {
  p.validate();
  if (mode == GoodputMode::kFixedBeta &&
      (fixed_beta < 0.0 || fixed_beta > 1.0))
    throw std::domain_error("avg_goodput_analytic: beta must be in [0, 1]");

  const DerivedConstants k = derive_constants(p);
  // Transmitter-side power density: same quantization loss, no aging.
  const DerivedConstants kt =
      derive_constants_raw(p.n_b, k.delta, 1.0, p.pathloss.alpha_f, k.q_d);
  const double rho_bar = geometry::rho_bar_analytic(p);
  const double hi = effective_power_quantile(kt, p.n_b, 1.0 - 1e-8);

  auto survival = [&](double u) {  // u = beta * z (channel-power units)
    if (p.density == 0.0) return ccdf_no_interference(u, k, p.n_b);
    return success_probability(u * rho_bar, k, p.density);
  };
  auto goodput_at = [&](double beta, double z) {
    if (beta <= 0.0) return 0.0;
    return std::log2(1.0 + beta * z * rho_bar) * survival(beta * z);
  };
  auto rate_for = [&](double z) {
    switch (mode) {
      case GoodputMode::kThroughput:
        return std::log2(1.0 + z * rho_bar);
      case GoodputMode::kNoBackoff:
        return goodput_at(1.0, z);
      case GoodputMode::kFixedBeta:
        return goodput_at(fixed_beta, z);
      case GoodputMode::kBackoffExact: {
        const backoff::BackoffSolution s = backoff::beta_star_for_state(
            z, k, p.n_b, rho_bar, p.density, /*approximate=*/false);
        return goodput_at(s.beta_star, z);
      }
      case GoodputMode::kBackoffPoly: {
        const backoff::BackoffSolution s = backoff::beta_star_for_state(
            z, k, p.n_b, rho_bar, p.density, /*approximate=*/true);
        return goodput_at(s.beta_star, z);
      }
    }
    return 0.0;
  };

  return mathkit::integrate_adaptive(
      [&](double z) { return rate_for(z) * effective_power_pdf(z, kt, p.n_b); },
      1e-12, hi, 1e-6);
}

}  // namespace analytics
}  // namespace femtonet
