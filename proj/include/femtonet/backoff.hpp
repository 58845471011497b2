#pragma once
// Optimal rate-backoff factor beta*: exact stationarity solves, the
// polynomial / quadratic approximations, and a grid-search oracle. All
// solvers maximize log2(1 + beta z rho_bar) * P[success at beta z].

#include <vector>

#include "femtonet/analytics.hpp"
#include "femtonet/params.hpp"

namespace femtonet {
namespace backoff {

enum class Method {
  kExactRoot,
  kPolynomialApprox,
  kQuadraticApprox,
  kGridOracle,
};

struct BackoffSolution {
  double beta_star = 1.0;       // in [0, 1]
  Method method = Method::kExactRoot;
  double objective_value = 0.0; // goodput integrand at beta_star
  bool fallback = false;        // approximation failed; grid oracle used
};

// Goodput integrand at one channel state. `upsilon` is the transmitter-side
// effective power (channel-power units); the rate term scales it by the
// long-term SIR statistic, the success term is the delay-only survival
// function (no field) or the Poisson-field success probability.
double objective(double beta, double upsilon, const SystemParams& p,
                 bool interference);

// Exhaustive grid maximization refined by golden section; the reference the
// closed-form solvers are checked against.
BackoffSolution beta_star_grid_oracle(double upsilon, const SystemParams& p,
                                      bool interference, int grid_points);

// Delay-limited case: root of the analytic objective derivative.
BackoffSolution beta_star_delay(double upsilon, const SystemParams& p);

// Delay-limited polynomial approximation (merged-scale regime): largest real
// root in (0, 1] of the stationarity polynomial, clamped to 1 when every
// root lies above 1.
BackoffSolution beta_star_delay_poly(double upsilon, const SystemParams& p);

// Poisson-field case: exact derivative root by default, or the quadratic
// approximation in the exponent variable when use_quadratic is set. A zero
// density degrades to the delay-only solver.
BackoffSolution beta_star_interference(double upsilon, const SystemParams& p,
                                       bool use_quadratic = false);

// ---- state-level entry points (precomputed constants; used by quadrature,
// ---- sweep surfaces, and the per-trial lookup table) ----

BackoffSolution grid_oracle_for_state(double z,
                                      const analytics::DerivedConstants& k,
                                      int n_b, double rho_bar, double density,
                                      int grid_points);
BackoffSolution beta_star_delay_for_state(double z,
                                          const analytics::DerivedConstants& k,
                                          int n_b, double rho_bar);
BackoffSolution beta_star_delay_poly_for_state(
    double z, const analytics::DerivedConstants& k, int n_b, double rho_bar);
BackoffSolution beta_star_interference_for_state(
    double z, const analytics::DerivedConstants& k, int n_b, double rho_bar,
    double density, bool use_quadratic);

// Dispatch on density (field vs delay-only) and approximation flavor.
BackoffSolution beta_star_for_state(double z,
                                    const analytics::DerivedConstants& k,
                                    int n_b, double rho_bar, double density,
                                    bool approximate);

// Analytic derivative of the state-level objective with respect to beta;
// exposed for finite-difference validation.
double objective_derivative_for_state(double beta, double z,
                                      const analytics::DerivedConstants& k,
                                      int n_b, double rho_bar,
                                      double density);
double objective_for_state(double beta, double z,
                           const analytics::DerivedConstants& k, int n_b,
                           double rho_bar, double density);

// Precomputed beta*(z) on a log-spaced grid with linear interpolation in
// log z; lets the Monte Carlo path apply per-trial backoff cheaply.
class BetaTable {
 public:
  BetaTable(const analytics::DerivedConstants& k, int n_b, double rho_bar,
            double density, bool approximate, double z_lo, double z_hi,
            int points = 513);
  double beta_for(double z) const;

 private:
  double log_lo_;
  double log_hi_;
  double step_;
  std::vector<double> betas_;
};

}  // namespace backoff
}  // namespace femtonet
