#include "femtonet/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace femtonet {
namespace geometry {

InterfererField sample_ppp_disc(double density, double radius, double d_min,
                                RandomStream& rng) {
  if (density < 0.0) throw std::domain_error("sample_ppp_disc: density < 0");
  if (radius <= 0.0) throw std::domain_error("sample_ppp_disc: radius <= 0");
  if (d_min < 0.0 || d_min >= radius)
    throw std::domain_error("sample_ppp_disc: d_min outside [0, radius)");

  InterfererField field;
  if (density == 0.0) return field;

  const double mean_count = density * M_PI * radius * radius;
  const std::uint64_t count = rng.poisson(mean_count);
  field.x.reserve(count);
  field.y.reserve(count);
  field.marks.reserve(count);

  const double d2 = d_min * d_min;
  const double r2 = radius * radius;
  for (std::uint64_t i = 0; i < count; ++i) {
    // Uniform point on the annulus [d_min, radius]: the guard-zone core is
    // folded back onto the annulus so the count keeps its full-disc mean.
    const double u = rng.uniform();
    const double r = std::sqrt(d2 + u * (r2 - d2));
    const double phi = 2.0 * M_PI * rng.uniform();
    field.x.push_back(r * std::cos(phi));
    field.y.push_back(r * std::sin(phi));
    field.marks.push_back(rng.expo(1.0));
  }
  return field;
}

double pathloss_ratio(double distance, const PathlossParams& p) {
  if (distance <= 0.0) throw std::domain_error("pathloss_ratio: distance <= 0");
  return p.rho_f * std::pow(distance, p.alpha_m) / p.rho_m;
}

double interference_power(const InterfererField& field, double alpha_f) {
  if (field.y.size() != field.x.size() ||
      field.marks.size() != field.x.size())
    throw std::domain_error("interference_power: ragged field");
  double total = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double r2 = field.x[i] * field.x[i] + field.y[i] * field.y[i];
    total += field.marks[i] * std::pow(r2, -0.5 * alpha_f);
  }
  return total;
}

double campbell_mean_interference(double density, double d_min, double radius,
                                  double alpha_f) {
  if (density < 0.0)
    throw std::domain_error("campbell_mean_interference: density < 0");
  if (d_min <= 0.0 || radius <= d_min)
    throw std::domain_error("campbell_mean_interference: need 0 < d_min < radius");
  if (alpha_f <= 2.0)
    throw std::domain_error("campbell_mean_interference: alpha_f <= 2");
  // E[sum m r^-a] over the annulus = 2 pi lambda int_dmin^R r^(1-a) dr.
  const double a2 = alpha_f - 2.0;
  return 2.0 * M_PI * density *
         (std::pow(d_min, -a2) - std::pow(radius, -a2)) / a2;
}

RhoBarEstimate estimate_rho_bar(const SystemParams& p, int trials,
                                RandomStream& rng) {
  p.validate();
  RhoBarEstimate est;
  if (p.density == 0.0) {
    est.no_interference = true;
    est.rho_bar =
        p.pathloss.rho_m * std::pow(p.user_distance, -p.pathloss.alpha_m);
    return est;
  }
  if (trials <= 0) throw std::domain_error("estimate_rho_bar: trials <= 0");

  const double radius = kFieldRadiusFactor * p.cell_radius;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const InterfererField field =
        sample_ppp_disc(p.density, radius, p.pathloss.d_min, rng);
    sum += interference_power(field, p.pathloss.alpha_f);
  }
  est.mc_mean_if = sum / trials;
  est.campbell_mean_if = campbell_mean_interference(
      p.density, p.pathloss.d_min, radius, p.pathloss.alpha_f);
  const double qd = pathloss_ratio(p.user_distance, p.pathloss);
  est.rho_bar = 1.0 / (qd * est.mc_mean_if);
  return est;
}

double rho_bar_analytic(const SystemParams& p) {
  p.validate();
  if (p.density == 0.0)
    return p.pathloss.rho_m * std::pow(p.user_distance, -p.pathloss.alpha_m);
  const double radius = kFieldRadiusFactor * p.cell_radius;
  const double mean_if = campbell_mean_interference(
      p.density, p.pathloss.d_min, radius, p.pathloss.alpha_f);
  return 1.0 / (pathloss_ratio(p.user_distance, p.pathloss) * mean_if);
}

}  // namespace geometry
}  // namespace femtonet
