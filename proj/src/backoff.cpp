#include "femtonet/backoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "femtonet/geometry.hpp"
#include "femtonet/mathkit.hpp"

namespace femtonet {
namespace backoff {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Unclamped field success probability and its beta-derivative pieces.
struct FieldTerms {
  double k1;  // exponent coefficient for the kappa1 scale
  double k2;  // exponent coefficient for the kappa2 scale
};

FieldTerms field_terms(double z, const analytics::DerivedConstants& k,
                       double rho_bar, double density) {
  // omega_j(beta) = density*c_f*(beta z rho_bar q_d / kappa_j)^{delta_f}
  //              = K_j * beta^{delta_f}
  const double base = z * rho_bar * k.q_d;
  FieldTerms t;
  t.k1 = density * k.c_f * std::pow(base / k.kappa1, k.delta_f);
  t.k2 = density * k.c_f * std::pow(base / k.kappa2, k.delta_f);
  return t;
}

double field_success(double beta, const FieldTerms& t,
                     const analytics::DerivedConstants& k) {
  const double bd = std::pow(beta, k.delta_f);
  const double w1 = t.k1 * bd;
  const double w2 = t.k2 * bd;
  const double p =
      (k.a1 * w1 + k.a2) * std::exp(-w1) + k.c2 * std::exp(-w2);
  return std::clamp(p, 0.0, 1.0);
}

double field_success_deriv(double beta, const FieldTerms& t,
                           const analytics::DerivedConstants& k) {
  const double bd = std::pow(beta, k.delta_f);
  const double w1 = t.k1 * bd;
  const double w2 = t.k2 * bd;
  const double w1p = k.delta_f * t.k1 * std::pow(beta, k.delta_f - 1.0);
  const double w2p = k.delta_f * t.k2 * std::pow(beta, k.delta_f - 1.0);
  return std::exp(-w1) * w1p * (k.a1 - (k.a1 * w1 + k.a2)) -
         k.c2 * w2p * std::exp(-w2);
}

struct StateObjective {
  double z;
  const analytics::DerivedConstants* k;
  int n_b;
  double rho_bar;
  double density;
  FieldTerms terms{0.0, 0.0};

  StateObjective(double z_, const analytics::DerivedConstants& k_, int n_b_,
                 double rho_bar_, double density_)
      : z(z_), k(&k_), n_b(n_b_), rho_bar(rho_bar_), density(density_) {
    if (density > 0.0) terms = field_terms(z, k_, rho_bar, density);
  }

  double success(double beta) const {
    if (density == 0.0)
      return analytics::ccdf_no_interference(beta * z, *k, n_b);
    return field_success(beta, terms, *k);
  }

  double value(double beta) const {
    if (beta <= 0.0) return 0.0;
    return std::log2(1.0 + beta * z * rho_bar) * success(beta);
  }

  double derivative(double beta) const {
    const double zr = z * rho_bar;
    const double rate = std::log2(1.0 + beta * zr);
    const double rate_p = zr / ((1.0 + beta * zr) * kLn2);
    double succ, succ_p;
    if (density == 0.0) {
      succ = analytics::ccdf_no_interference(beta * z, *k, n_b);
      succ_p = -z * analytics::effective_power_pdf(beta * z, *k, n_b);
    } else {
      succ = field_success(beta, terms, *k);
      succ_p = field_success_deriv(beta, terms, *k);
    }
    return rate_p * succ + rate * succ_p;
  }
};

// Shared root-scan: find stationary points of the derivative on (0, 1),
// evaluate the objective at each and at the boundary beta = 1, return the
// maximizer (beta = 1 when no interior point wins).
BackoffSolution maximize_by_stationarity(const StateObjective& g,
                                         Method method) {
  constexpr int kScan = 256;
  constexpr double kLo = 1e-9;
  BackoffSolution best;
  best.method = method;
  best.beta_star = 1.0;
  best.objective_value = g.value(1.0);

  double prev_b = kLo;
  double prev_d = g.derivative(prev_b);
  for (int i = 1; i <= kScan; ++i) {
    const double b = kLo + (1.0 - kLo) * static_cast<double>(i) / kScan;
    const double d = g.derivative(b);
    if ((prev_d > 0.0 && d < 0.0) || (prev_d < 0.0 && d > 0.0)) {
      double root;
      try {
        root = mathkit::find_root_bracketed(
            [&](double x) { return g.derivative(x); }, prev_b, b, 1e-12,
            1e-13);
      } catch (const std::exception&) {
        prev_b = b;
        prev_d = d;
        continue;
      }
      const double val = g.value(root);
      if (val > best.objective_value) {
        best.beta_star = root;
        best.objective_value = val;
      }
    }
    prev_b = b;
    prev_d = d;
  }
  return best;
}

double golden_refine(const StateObjective& g, double lo, double hi) {
  return mathkit::golden_section_max(
      [&](double b) { return g.value(b); }, lo, hi, 1e-8);
}

BackoffSolution grid_oracle_impl(const StateObjective& g, int grid_points) {
  if (grid_points < 100)
    throw std::domain_error("beta_star_grid_oracle: grid_points must be >= 100");
  int best_i = 0;
  double best_v = -1.0;
  for (int i = 0; i <= grid_points - 1; ++i) {
    const double b = static_cast<double>(i) / (grid_points - 1);
    const double v = g.value(b);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double lo =
      std::max(0.0, static_cast<double>(best_i - 1) / (grid_points - 1));
  const double hi =
      std::min(1.0, static_cast<double>(best_i + 1) / (grid_points - 1));
  double b = golden_refine(g, lo, hi);
  double v = g.value(b);
  const double v1 = g.value(1.0);
  if (v1 >= v) {
    b = 1.0;
    v = v1;
  }
  BackoffSolution out;
  out.beta_star = b;
  out.method = Method::kGridOracle;
  out.objective_value = v;
  return out;
}

}  // namespace

double objective_for_state(double beta, double z,
                           const analytics::DerivedConstants& k, int n_b,
                           double rho_bar, double density) {
  return StateObjective(z, k, n_b, rho_bar, density).value(beta);
}

double objective_derivative_for_state(double beta, double z,
                                      const analytics::DerivedConstants& k,
                                      int n_b, double rho_bar,
                                      double density) {
  return StateObjective(z, k, n_b, rho_bar, density).derivative(beta);
}

BackoffSolution grid_oracle_for_state(double z,
                                      const analytics::DerivedConstants& k,
                                      int n_b, double rho_bar, double density,
                                      int grid_points) {
  return grid_oracle_impl(StateObjective(z, k, n_b, rho_bar, density),
                          grid_points);
}

BackoffSolution beta_star_delay_for_state(double z,
                                          const analytics::DerivedConstants& k,
                                          int n_b, double rho_bar) {
  if (!(z > 0.0)) throw std::domain_error("beta_star_delay: upsilon must be > 0");
  return maximize_by_stationarity(StateObjective(z, k, n_b, rho_bar, 0.0),
                                  Method::kExactRoot);
}

BackoffSolution beta_star_delay_poly_for_state(
    double z, const analytics::DerivedConstants& k, int n_b, double rho_bar) {
  if (!(z > 0.0)) throw std::domain_error("beta_star_delay_poly: upsilon must be > 0");
  const double ups = z / k.kappa1;
  const double d = k.delta;

  // Ascending stationarity polynomial of degree n_b - 1 in beta:
  //   (1 - beta*ups) * (d^{n_b-1}/(1-d) - f1(beta)) - beta * f2(beta) = 0
  // with f1, f2 the truncated exponential sums of the mixture.
  mathkit::Polynomial poly;
  poly.coefficients.assign(n_b, 0.0);
  const double base = std::pow(d, n_b - 1) / (1.0 - d);
  poly.coefficients[0] += base;
  poly.coefficients[1] -= base * ups;
  double fact = 1.0;  // k!
  for (int i = 1; i <= n_b - 2; ++i) {
    fact = 1.0;
    for (int kk = 1; kk <= i; ++kk) {
      fact *= kk;
      const double cf = std::pow(d, i) * std::pow(ups, kk);
      poly.coefficients[kk] -= cf / fact;
      poly.coefficients[kk + 1] += cf / fact * ups;
      poly.coefficients[kk] -= cf / (fact / kk);  // (k-1)! = k!/k
    }
  }

  BackoffSolution out;
  out.method = Method::kPolynomialApprox;
  std::vector<double> roots;
  try {
    roots = mathkit::poly_real_roots(poly);
  } catch (const std::exception&) {
    roots.clear();
  }

  double best_in_unit = -1.0;
  bool any_above = false;
  for (double r : roots) {
    if (r > 0.0 && r <= 1.0) best_in_unit = std::max(best_in_unit, r);
    if (r > 1.0) any_above = true;
  }
  if (best_in_unit < 0.0 && !any_above) {
    // Real roots above the reported window are invisible; detect one by a
    // sign change beyond beta = 1.
    const double at1 = poly.evaluate(1.0);
    for (double probe : {1e2, 1e4, 1e6, 1e9}) {
      if (at1 * poly.evaluate(probe) < 0.0) {
        any_above = true;
        break;
      }
    }
  }

  if (best_in_unit > 0.0) {
    out.beta_star = best_in_unit;
  } else if (any_above) {
    out.beta_star = 1.0;
  } else {
    BackoffSolution fb =
        grid_oracle_impl(StateObjective(z, k, n_b, rho_bar, 0.0), 2001);
    fb.fallback = true;
    return fb;
  }
  out.objective_value =
      objective_for_state(out.beta_star, z, k, n_b, rho_bar, 0.0);
  return out;
}

BackoffSolution beta_star_interference_for_state(
    double z, const analytics::DerivedConstants& k, int n_b, double rho_bar,
    double density, bool use_quadratic) {
  if (!(z > 0.0))
    throw std::domain_error("beta_star_interference: upsilon must be > 0");
  if (density == 0.0) {
    if (use_quadratic)
      return beta_star_delay_poly_for_state(z, k, n_b, rho_bar);
    return beta_star_delay_for_state(z, k, n_b, rho_bar);
  }
  const StateObjective g(z, k, n_b, rho_bar, density);
  if (!use_quadratic) return maximize_by_stationarity(g, Method::kExactRoot);

  // Quadratic in the exponent variable w1 = density*c_f*(beta z rho_bar
  // q_d/kappa1)^{delta_f}:
  //   a1*df*w1^2 + df*(c2 - a1(1+ln2) + a2)*w1 - (a2+c2)/ln2 = 0
  const double qa = k.a1 * k.delta_f;
  const double qb = k.delta_f * (k.c2 - k.a1 * (1.0 + kLn2) + k.a2);
  const double qc = -(k.a2 + k.c2) / kLn2;
  std::vector<double> cands;
  if (std::abs(qa) < 1e-300) {
    if (qb != 0.0) cands.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      cands.push_back((-qb + sq) / (2.0 * qa));
      cands.push_back((-qb - sq) / (2.0 * qa));
    }
  }
  double best_b = -1.0;
  double best_v = -1.0;
  for (double w : cands) {
    if (w <= 0.0) continue;
    const double beta = std::pow(w / (density * k.c_f), 1.0 / k.delta_f) *
                        k.kappa1 / (z * rho_bar * k.q_d);
    if (beta <= 0.0 || beta > 1.0) continue;
    const double v = g.value(beta);
    if (v > best_v) {
      best_v = v;
      best_b = beta;
    }
  }
  if (best_b < 0.0) {
    BackoffSolution fb = grid_oracle_impl(g, 2001);
    fb.fallback = true;
    return fb;
  }
  BackoffSolution out;
  out.beta_star = best_b;
  out.method = Method::kQuadraticApprox;
  out.objective_value = best_v;
  return out;
}

BackoffSolution beta_star_for_state(double z,
                                    const analytics::DerivedConstants& k,
                                    int n_b, double rho_bar, double density,
                                    bool approximate) {
  if (density == 0.0) {
    return approximate ? beta_star_delay_poly_for_state(z, k, n_b, rho_bar)
                       : beta_star_delay_for_state(z, k, n_b, rho_bar);
  }
  return beta_star_interference_for_state(z, k, n_b, rho_bar, density,
                                          approximate);
}

// ---- SystemParams-level wrappers ----

namespace {

struct StateContext {
  analytics::DerivedConstants k;
  double rho_bar;
};

StateContext context_for(const SystemParams& p) {
  StateContext c{analytics::derive_constants(p),
                 geometry::rho_bar_analytic(p)};
  return c;
}

}  // namespace

double objective(double beta, double upsilon, const SystemParams& p,
                 bool interference) {
  if (beta < 0.0 || beta > 1.0)
    throw std::domain_error("objective: beta must be in [0, 1]");
  if (!(upsilon > 0.0))
    throw std::domain_error("objective: upsilon must be > 0");
  const StateContext c = context_for(p);
  const double density = interference ? p.density : 0.0;
  return objective_for_state(beta, upsilon, c.k, p.n_b, c.rho_bar, density);
}

BackoffSolution beta_star_grid_oracle(double upsilon, const SystemParams& p,
                                      bool interference, int grid_points) {
  if (!(upsilon > 0.0))
    throw std::domain_error("beta_star_grid_oracle: upsilon must be > 0");
  const StateContext c = context_for(p);
  const double density = interference ? p.density : 0.0;
  return grid_oracle_for_state(upsilon, c.k, p.n_b, c.rho_bar, density,
                               grid_points);
}

BackoffSolution beta_star_delay(double upsilon, const SystemParams& p) {
  const StateContext c = context_for(p);
  return beta_star_delay_for_state(upsilon, c.k, p.n_b, c.rho_bar);
}

BackoffSolution beta_star_delay_poly(double upsilon, const SystemParams& p) {
  const StateContext c = context_for(p);
  return beta_star_delay_poly_for_state(upsilon, c.k, p.n_b, c.rho_bar);
}

BackoffSolution beta_star_interference(double upsilon, const SystemParams& p,
                                       bool use_quadratic) {
  const StateContext c = context_for(p);
  return beta_star_interference_for_state(upsilon, c.k, p.n_b, c.rho_bar,
                                          p.density, use_quadratic);
}

// ---- BetaTable ----

BetaTable::BetaTable(const analytics::DerivedConstants& k, int n_b,
                     double rho_bar, double density, bool approximate,
                     double z_lo, double z_hi, int points) {
  if (!(z_lo > 0.0) || !(z_hi > z_lo))
    throw std::domain_error("BetaTable: need 0 < z_lo < z_hi");
  if (points < 2) throw std::domain_error("BetaTable: points must be >= 2");
  log_lo_ = std::log(z_lo);
  log_hi_ = std::log(z_hi);
  step_ = (log_hi_ - log_lo_) / (points - 1);
  betas_.resize(points);
  for (int i = 0; i < points; ++i) {
    const double z = std::exp(log_lo_ + i * step_);
    betas_[i] =
        beta_star_for_state(z, k, n_b, rho_bar, density, approximate)
            .beta_star;
  }
}

double BetaTable::beta_for(double z) const {
  if (!(z > 0.0)) return betas_.front();
  const double lz = std::log(z);
  if (lz <= log_lo_) return betas_.front();
  if (lz >= log_hi_) return betas_.back();
  const double t = (lz - log_lo_) / step_;
  const std::size_t i = static_cast<std::size_t>(t);
  const double frac = t - static_cast<double>(i);
  if (i + 1 >= betas_.size()) return betas_.back();
  return betas_[i] * (1.0 - frac) + betas_[i + 1] * frac;
}

}  // namespace backoff
}  // namespace femtonet
