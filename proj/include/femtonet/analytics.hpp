#pragma once
// Closed-form layer: the effective-power mixture CDF of the aged, quantized
// beamforming gain, the cross-tier success probability, the shot-noise
// Laplace transform, the maximum contention density under an outage target,
// and the average-goodput quadrature.

#include "femtonet/params.hpp"

namespace femtonet {
namespace analytics {

// Global chi-square scale convention: CN(0,1) channel entries make each
// |h_i|^2 an Exp(1), i.e. (1/2)*chi^2_2. Calibrated empirically (see README).
inline constexpr double kChiSquareScale = 0.5;

// All constants derived from one system configuration.
struct DerivedConstants {
  double eta = 1.0;      // temporal correlation
  double delta = 0.0;    // quantization loss 2^{-B/(n_b-1)}
  double delta_f = 0.0;  // 2 / alpha_f
  double q_d = 0.0;      // cross-tier pathloss ratio at the user distance
  double kappa1 = 0.0;   // scale of the quantization-loss branch
  double kappa2 = 0.0;   // scale of the full-power branch
  double c1 = 0.0;
  double c2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double c_f = 0.0;      // shot-noise constant (2 pi/alpha) G(2/a) G(1-2/a)
  int n_b = 2;
};

DerivedConstants derive_constants(const SystemParams& p);

// Continuous-delta entry point (used by the distortion sweep); delta in
// (0, 1), eta in [0, 1].
DerivedConstants derive_constants_raw(int n_b, double delta, double eta,
                                      double alpha_f, double q_d);

// CDF of the effective beamforming power seen after the feedback delay.
double effective_power_cdf(double z, const DerivedConstants& k, int n_b);

// Its density (analytic derivative of the CDF).
double effective_power_pdf(double z, const DerivedConstants& k, int n_b);

// Survival function 1 - CDF; the delay-only success probability.
double ccdf_no_interference(double z, const DerivedConstants& k, int n_b);

// P[SIR >= upsilon] under the Poisson femtocell field (first-order
// shot-noise expansion); exactly 1.0 when density == 0.
double success_probability(double upsilon, const SystemParams& p);
double success_probability(double upsilon, const DerivedConstants& k,
                           double density);

// True when lambda * C_f * (upsilon q_d / kappa1)^{delta_f} <= 1, i.e. the
// first-order expansion behind success_probability is trustworthy.
bool expansion_valid(double upsilon, const DerivedConstants& k,
                     double density);

// E[exp(-theta I_f)] for the full-plane power-law shot noise.
double laplace_interference(double theta, double density, double alpha_f);

struct MaxDensityResult {
  double exact = 0.0;    // scalar root of the outage-target equation
  double lambert = 0.0;  // closed form under the merged-scale approximation
  bool capped = false;   // exact path hit the density cap (vacuous target)
};

// Largest density satisfying P[SIR >= upsilon] >= 1 - epsilon, both by exact
// root solve and by the closed Lambert-W form.
MaxDensityResult max_density(double epsilon, double upsilon,
                             const SystemParams& p,
                             double density_cap = 1.0);

enum class GoodputMode {
  kThroughput,   // supported-rate envelope, success forced to 1
  kNoBackoff,    // beta = 1
  kBackoffExact, // per-state beta from the exact stationarity solve
  kBackoffPoly,  // per-state beta from the polynomial approximation
  kFixedBeta,    // caller-supplied constant beta
};

// Mean goodput by adaptive quadrature over the transmitter-side power
// density (correlation 1, scaled by the long-term SIR statistic).
double avg_goodput_analytic(const SystemParams& p, GoodputMode mode,
                            double fixed_beta = 1.0);

// z with effective_power_cdf(z) = prob, by bisection-backed root solve.
double effective_power_quantile(const DerivedConstants& k, int n_b,
                                double prob);

}  // namespace analytics
}  // namespace femtonet
