#pragma once
// Special functions and scalar solvers used by the analytic layer: Bessel J0,
// Gamma, Lambert W (both real branches), real polynomial roots, bracketed
// root finding, golden-section maximization and adaptive quadrature.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace femtonet {

// Thrown when an iterative solver fails to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a root bracket does not contain a sign change.
class BracketError : public std::runtime_error {
 public:
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

namespace mathkit {

// Default tolerances; every solver accepts an override.
inline constexpr double kRootResidualTol = 1e-10;   // |f(r)| target
inline constexpr double kRootWidthTol = 1e-12;      // bracket width target
inline constexpr double kPolyResidualTol = 1e-9;    // polynomial root residual
inline constexpr double kPolyImagTol = 1e-8;        // |Im| filter for real roots
inline constexpr double kLambertResidualTol = 1e-12;
inline constexpr double kGoldenWidth = 1e-8;

// Bessel function of the first kind, order zero.
// Power series for |x| <= 13, Hankel asymptotic expansion beyond; absolute
// error <= 1e-10 on |x| <= 50 (validated against high-precision references).
double bessel_j0(double x);

// Gamma function for x > 0 (Lanczos approximation, g = 7).
// Relative error <= 1e-10 on (0, 10].
double gamma_fn(double x);

enum class LambertBranch { principal, lower };

// Real Lambert W: solves W * exp(W) = x.
// principal: x >= -1/e.  lower: -1/e <= x < 0.
// Residual |W e^W - x| <= tol guaranteed or NumericError.
double lambert_w(double x, LambertBranch branch,
                 double residual_tol = kLambertResidualTol);

// Real polynomial with coefficients in ascending degree order.
struct Polynomial {
  std::vector<double> coefficients;  // coefficients[k] multiplies x^k

  // Trims trailing (leading-degree) zeros; degree of the zero polynomial is 0.
  int degree() const;
  double evaluate(double x) const;
};

// All real roots in [-10, 10], ascending, each with residual <= residual_tol.
// Durand-Kerner iteration over the complex roots, |Im| <= imag_tol filter,
// Newton polish on the real axis.
std::vector<double> poly_real_roots(const Polynomial& p,
                                    double imag_tol = kPolyImagTol,
                                    double residual_tol = kPolyResidualTol);

// Brent's method on [lo, hi]; requires f(lo) * f(hi) <= 0.
// Stops when |f| <= f_tol or the bracket width <= x_tol.
double find_root_bracketed(const std::function<double(double)>& f, double lo,
                           double hi, double f_tol = kRootResidualTol,
                           double x_tol = kRootWidthTol);

// Golden-section maximization of a unimodal-enough f on [lo, hi]; refines to
// the given interval width and returns the abscissa of the maximum.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double width = kGoldenWidth);

// Adaptive Simpson quadrature of f on [lo, hi]; relative tolerance with an
// absolute floor. Throws NumericError when the recursion depth is exhausted.
double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol = 1e-6,
                          double abs_floor = 1e-12);

}  // namespace mathkit
}  // namespace femtonet
