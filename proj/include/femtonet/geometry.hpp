#pragma once
// Poisson field of femtocell interferers around the user, the pathloss
// ratio, aggregate shot-noise interference, and the long-term
// interference-to-signal statistic.

#include <vector>

#include "femtonet/params.hpp"
#include "femtonet/rng.hpp"

namespace femtonet {

// Sampled interferer field. Positions are meters relative to the user at the
// origin; marks are the per-interferer fading powers.
struct InterfererField {
  std::vector<double> x;      // m
  std::vector<double> y;      // m
  std::vector<double> marks;  // unit-mean exponential fading powers

  std::size_t size() const { return x.size(); }
};

namespace geometry {

// Field radius used by trial sampling and long-term statistics, as a factor
// of the cell radius; the far tail beyond it contributes < 0.1% of the mean.
inline constexpr double kFieldRadiusFactor = 2.0;

// Count ~ Poisson(density * pi * radius^2); points uniform, with the
// sub-d_min core redistributed uniformly onto the annulus [d_min, radius].
InterfererField sample_ppp_disc(double density, double radius, double d_min,
                                RandomStream& rng);

// rho_f * D^alpha_m / rho_m: the femto-to-macro pathloss ratio at distance D.
double pathloss_ratio(double distance, const PathlossParams& p);

// Mark-weighted power-law sum over the field; 0 for an empty field.
double interference_power(const InterfererField& field, double alpha_f);

// Closed-form mean of interference_power over the annulus [d_min, radius]
// for unit-mean marks (Campbell's formula).
double campbell_mean_interference(double density, double d_min, double radius,
                                  double alpha_f);

struct RhoBarEstimate {
  double rho_bar = 0.0;        // 1 / E[Q_D I_f]  (or the no-interference SNR)
  double mc_mean_if = 0.0;     // Monte Carlo E[I_f]
  double campbell_mean_if = 0.0;  // closed-form E[I_f] cross-check
  bool no_interference = false;   // density == 0 sentinel path taken
};

// Monte Carlo estimate of rho_bar = 1 / E[Q_D I_f] at p.user_distance, with
// the Campbell closed form alongside. density == 0 returns the
// no-interference reference rho_m * D^-alpha_m instead.
RhoBarEstimate estimate_rho_bar(const SystemParams& p, int trials,
                                RandomStream& rng);

// Deterministic counterpart used by the analytic layer: Campbell mean in
// place of the Monte Carlo mean (identical sentinel behavior).
double rho_bar_analytic(const SystemParams& p);

}  // namespace geometry
}  // namespace femtonet
