#include "femtonet/mathkit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace femtonet {
namespace mathkit {

namespace {
constexpr double kPi = 3.14159265358979323846;
// Switch between the power series and the Hankel asymptotic expansion.
// At x = 13 the series loses ~2 digits to cancellation (still < 1e-12) and
// the asymptotic optimal-truncation error is ~e^{-26}; both are inside the
// 1e-10 contract, which a switch at 8 would not satisfy.
constexpr double kJ0SeriesLimit = 13.0;
}  // namespace

double bessel_j0(double x) {
  if (!std::isfinite(x)) throw std::domain_error("bessel_j0: non-finite input");
  const double ax = std::fabs(x);
  if (ax <= kJ0SeriesLimit) {
    // J0(x) = sum_k (-1)^k (x^2/4)^k / (k!)^2, summed to machine tail.
    const double q = 0.25 * ax * ax;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 60; ++k) {
      term *= -q / (static_cast<double>(k) * k);
      sum += term;
      if (std::fabs(term) < 1e-18 * (1.0 + std::fabs(sum))) break;
    }
    return sum;
  }
  // Hankel expansion: J0 = sqrt(2/(pi x)) [cos(w) P(x) + sin(w) Qs(x)],
  // w = x - pi/4, with
  //   P(x)  = 1 - b2/x^2 + b4/x^4 - ...
  //   Qs(x) = b1/x - b3/x^3 + ...
  // where b_k = prod_{j<=k} (2j-1)^2 / (k! 8^k). Optimal truncation: stop
  // before terms start growing.
  double b = 1.0;            // b_k
  double inv = 1.0 / ax;
  double p_sum = 1.0, q_sum = 0.0;
  double prev_mag = std::numeric_limits<double>::max();
  double sign_p = -1.0, sign_q = 1.0;
  double x_pow = inv;  // inv^k
  for (int k = 1; k <= 24; ++k) {
    const double odd = 2.0 * k - 1.0;
    b *= odd * odd / (8.0 * k);
    const double term = b * x_pow;
    if (term > prev_mag) break;  // divergent tail reached
    prev_mag = term;
    if (k % 2 == 1) {
      q_sum += sign_q * term;
      sign_q = -sign_q;
    } else {
      p_sum += sign_p * term;
      sign_p = -sign_p;
    }
    x_pow *= inv;
    if (term < 1e-18) break;
  }
  const double w = ax - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * ax)) * (std::cos(w) * p_sum + std::sin(w) * q_sum);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn: requires x > 0");
  // Lanczos approximation, g = 7, 9 coefficients.
  static const double kCoef[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection keeps full precision for small arguments.
    return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double a = kCoef[0];
  for (int i = 1; i < 9; ++i) a += kCoef[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double lambert_w(double x, LambertBranch branch, double residual_tol) {
  const double inv_e = std::exp(-1.0);
  if (x < -inv_e - 1e-15) throw std::domain_error("lambert_w: x < -1/e");
  if (branch == LambertBranch::lower && x >= 0.0)
    throw std::domain_error("lambert_w: lower branch requires x < 0");
  if (x == 0.0) return 0.0;
  x = std::max(x, -inv_e);

  double w;
  if (branch == LambertBranch::principal) {
    if (x > std::exp(1.0)) {
      const double lx = std::log(x);
      w = lx - std::log(lx);
    } else if (x > -0.25) {
      w = x / (1.0 + x);  // crude but inside the Halley basin
    } else {
      const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
      w = -1.0 + p - p * p / 3.0;
    }
  } else {
    if (x > -0.1) {
      const double lx = std::log(-x);
      w = lx - std::log(-lx);
    } else {
      const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
      w = -1.0 - p - p * p / 3.0;
    }
  }

  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::fabs(f) <= residual_tol) return w;
    const double fp = ew * (w + 1.0);
    const double fpp = ew * (w + 2.0);
    const double denom = fp - 0.5 * f * fpp / fp;  // Halley step
    double step = f / (denom != 0.0 ? denom : fp);
    // Keep the lower branch below -1 and the principal branch above -1.
    double next = w - step;
    if (branch == LambertBranch::lower && next > -1.0) next = 0.5 * (w - 1.0);
    if (branch == LambertBranch::principal && next < -1.0) next = 0.5 * (w - 1.0);
    if (std::fabs(next - w) <= 1e-16 * (1.0 + std::fabs(next))) {
      w = next;
      break;
    }
    w = next;
  }
  const double resid = std::fabs(w * std::exp(w) - x);
  if (resid > residual_tol)
    throw NumericError("lambert_w failed to converge, residual " +
                       std::to_string(resid));
  return w;
}

int Polynomial::degree() const {
  int d = static_cast<int>(coefficients.size()) - 1;
  while (d > 0 && coefficients[d] == 0.0) --d;
  return std::max(d, 0);
}

double Polynomial::evaluate(double x) const {
  double acc = 0.0;
  for (int k = static_cast<int>(coefficients.size()) - 1; k >= 0; --k)
    acc = acc * x + coefficients[k];
  return acc;
}

std::vector<double> poly_real_roots(const Polynomial& p, double imag_tol,
                                    double residual_tol) {
  const int deg = p.degree();
  if (deg < 1) throw std::domain_error("poly_real_roots: degree must be >= 1");

  // Normalized monic coefficients, ascending.
  std::vector<double> c(p.coefficients.begin(), p.coefficients.begin() + deg + 1);
  const double lead = c[deg];
  for (double& v : c) v /= lead;

  using C = std::complex<double>;
  std::vector<C> roots(deg);
  const C seed(0.4, 0.9);
  C acc(1.0, 0.0);
  for (int i = 0; i < deg; ++i) {
    acc *= seed;
    roots[i] = acc;
  }
  auto eval = [&](C z) {
    C v(0.0, 0.0);
    for (int k = deg; k >= 0; --k) v = v * z + c[k];
    return v;
  };
  for (int it = 0; it < 800; ++it) {
    double worst = 0.0;
    for (int i = 0; i < deg; ++i) {
      C denom(1.0, 0.0);
      for (int j = 0; j < deg; ++j)
        if (j != i) denom *= roots[i] - roots[j];
      if (std::abs(denom) < 1e-300) denom = C(1e-300, 0.0);
      const C delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      worst = std::max(worst, std::abs(delta));
    }
    if (worst < 1e-14) break;
  }

  std::vector<double> out;
  for (const C& r : roots) {
    if (std::fabs(r.imag()) > imag_tol) continue;
    double x = r.real();
    // Newton polish on the real polynomial.
    for (int it = 0; it < 8; ++it) {
      double v = 0.0, dv = 0.0;
      for (int k = deg; k >= 0; --k) {
        dv = dv * x + v;
        v = v * x + c[k];
      }
      if (dv == 0.0) break;
      const double step = v / dv;
      x -= step;
      if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    if (x < -10.0 || x > 10.0) continue;
    // Residual measured on the normalized polynomial to keep the contract
    // scale-free.
    double v = 0.0;
    for (int k = deg; k >= 0; --k) v = v * x + c[k];
    if (std::fabs(v) > residual_tol) continue;
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double find_root_bracketed(const std::function<double(double)>& f, double lo,
                           double hi, double f_tol, double x_tol) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0)
    throw BracketError("find_root_bracketed: no sign change on bracket");

  // Brent's method.
  double c_pt = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c_pt; c_pt = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * x_tol;
    const double xm = 0.5 * (c_pt - b);
    if (std::fabs(fb) <= f_tol || std::fabs(xm) <= tol1) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c_pt) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c_pt = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  throw NumericError("find_root_bracketed: iteration budget exhausted, bracket [" +
                     std::to_string(a) + ", " + std::to_string(b) + "]");
}

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double width) {
  const double gr = 0.6180339887498949;  // (sqrt(5)-1)/2
  double a = lo, b = hi;
  double c_pt = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c_pt), fd = f(d);
  while (b - a > width) {
    if (fc > fd) {
      b = d;
      d = c_pt;
      fd = fc;
      c_pt = b - gr * (b - a);
      fc = f(c_pt);
    } else {
      a = c_pt;
      c_pt = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {
double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double m,
                     double b, double fa, double fm, double fb, double whole,
                     double tol, int depth) {
  if (depth > 60)
    throw NumericError("integrate_adaptive: recursion depth exhausted");
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adaptive_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}
}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol, double abs_floor) {
  if (hi <= lo) return 0.0;
  // Seed the tolerance from a coarse composite-Simpson estimate so the
  // relative criterion has a scale.
  const int n = 16;
  const double h = (hi - lo) / n;
  double coarse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = lo + i * h, b = a + h;
    coarse += simpson(a, b, f(a), f(0.5 * (a + b)), f(b));
  }
  const double tol = std::max(std::fabs(coarse) * rel_tol, abs_floor);
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo), fm = f(m), fb = f(hi);
  return adaptive_step(f, lo, m, hi, fa, fm, fb,
                       simpson(lo, hi, fa, fm, fb), tol, 0);
}

}  // namespace mathkit
}  // namespace femtonet
