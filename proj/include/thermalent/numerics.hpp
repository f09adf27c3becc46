#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace thermalent::numerics {

/// Node-doubling control for Gauss-Chebyshev quadrature.
struct QuadratureSpec {
  int order = 64;
  int max_order = 16384;
  double rel_tol = 1e-12;

  void validate() const;
};

struct RootSpec {
  double lo = 0.0;
  double hi = 1.0;
  double abs_tol = 1e-12;
  int max_iter = 200;

  void validate() const;
};

struct FixedPointSpec {
  double mixing = 0.5;
  double abs_tol = 1e-10;
  int max_iter = 10000;

  void validate() const;
};

using ScalarFunction = std::function<double(double)>;
using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

/// Fixed-rule n-point Gauss-Chebyshev (first kind) sum approximating
/// the integral of g(x)/sqrt(1-x^2) over [-1, 1].
double gauss_chebyshev(const ScalarFunction& g, int n);

/// Integral of g(x)/sqrt(1-x^2) over [-1, 1].
///
/// Starts at spec.order nodes and doubles until two successive estimates
/// agree to spec.rel_tol, measured against max(|I|, I_abs) where I_abs is the
/// same rule applied to |g|. Exact for polynomials of degree < 2*order.
/// Throws ConvergenceError (carrying the last two estimates) once
/// spec.max_order is exceeded.
double integrate_chebyshev_weight(const ScalarFunction& g, const QuadratureSpec& spec = {});

/// Brent's method on [spec.lo, spec.hi]. Requires f(lo)*f(hi) <= 0
/// (BracketError otherwise). The returned root always lies inside the
/// initial bracket and the final bracket is narrower than spec.abs_tol.
double find_root_bracketed(const ScalarFunction& f, const RootSpec& spec);

struct FixedPointResult {
  std::vector<double> value;
  int iterations = 0;
  /// max_i |map(value)_i - value_i| at the returned point.
  double residual = 0.0;
};

/// Damped iteration v <- (1-mixing) v + mixing map(v), stopping once the
/// undamped residual max|map(v) - v| drops below spec.abs_tol.
///
/// `on_step`, when given, receives the residual of every iteration.
FixedPointResult fixed_point_solve(const VectorMap& map, std::vector<double> initial,
                                   const FixedPointSpec& spec = {},
                                   const std::function<void(double)>& on_step = {});

}  // namespace thermalent::numerics
