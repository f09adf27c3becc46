#include "thermalent/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "thermalent/errors.hpp"

namespace thermalent::numerics {

void QuadratureSpec::validate() const {
  if (order < 8) throw UsageError(fmt::format("quadrature order must be >= 8, got {}", order));
  if (max_order < order)
    throw UsageError(fmt::format("quadrature max_order {} below order {}", max_order, order));
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw UsageError(fmt::format("quadrature rel_tol must lie in (0,1), got {}", rel_tol));
}

void RootSpec::validate() const {
  if (!(lo < hi)) throw UsageError(fmt::format("root bracket [{}, {}] is empty", lo, hi));
  if (!(abs_tol > 0.0)) throw UsageError("root abs_tol must be positive");
  if (max_iter <= 0) throw UsageError("root max_iter must be positive");
}

void FixedPointSpec::validate() const {
  if (!(mixing > 0.0 && mixing <= 1.0))
    throw UsageError(fmt::format("mixing must lie in (0,1], got {}", mixing));
  if (!(abs_tol > 0.0)) throw UsageError("fixed-point abs_tol must be positive");
  if (max_iter <= 0) throw UsageError("fixed-point max_iter must be positive");
}

namespace {

struct ChebyshevSum {
  double value;
  double magnitude;  // same rule applied to |g|
};

ChebyshevSum chebyshev_sum(const ScalarFunction& g, int n) {
  const double step = std::numbers::pi / n;
  double sum = 0.0;
  double abs_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double gx = g(std::cos((2 * i - 1) * step / 2));
    sum += gx;
    abs_sum += std::abs(gx);
  }
  return {sum * step, abs_sum * step};
}

}  // namespace

double gauss_chebyshev(const ScalarFunction& g, int n) {
  if (n <= 0) throw UsageError("Gauss-Chebyshev rule needs at least one node");
  return chebyshev_sum(g, n).value;
}

double integrate_chebyshev_weight(const ScalarFunction& g, const QuadratureSpec& spec) {
  spec.validate();
  ChebyshevSum previous = chebyshev_sum(g, spec.order);
  for (int n = 2 * spec.order; n <= spec.max_order; n *= 2) {
    const ChebyshevSum current = chebyshev_sum(g, n);
    const double scale = std::max(std::abs(current.value), current.magnitude);
    if (std::abs(current.value - previous.value) <= spec.rel_tol * scale) return current.value;
    previous = current;
  }
  const ChebyshevSum last = chebyshev_sum(g, spec.max_order);
  const ChebyshevSum before = chebyshev_sum(g, spec.max_order / 2);
  throw ConvergenceError(
      fmt::format("Gauss-Chebyshev quadrature did not reach rel_tol {} at {} nodes ({} vs {})",
                  spec.rel_tol, spec.max_order, before.value, last.value),
      before.value, last.value, std::abs(last.value - before.value));
}

double find_root_bracketed(const ScalarFunction& f, const RootSpec& spec) {
  spec.validate();
  constexpr double eps = std::numeric_limits<double>::epsilon();

  double a = spec.lo;
  double b = spec.hi;
  double fa = f(a);
  double fb = f(b);
  if (std::isnan(fa) || std::isnan(fb) || fa * fb > 0.0) {
    throw BracketError(fmt::format("no sign change on [{}, {}]: f = {}, {}", a, b, fa, fb), a, b,
                       fa, fb);
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < spec.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = std::max(0.5 * spec.abs_tol, 2.0 * eps * std::abs(b));
    const double mid = 0.5 * (c - b);
    if (std::abs(mid) <= tol || fb == 0.0) return b;

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * mid * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * mid * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * mid * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = mid;
        e = d;
      }
    } else {
      d = mid;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : std::copysign(tol, mid);
    fb = f(b);
  }
  throw ConvergenceError(
      fmt::format("root finder exceeded {} iterations (bracket [{}, {}])", spec.max_iter,
                  std::min(b, c), std::max(b, c)),
      c, b, std::abs(fb));
}

FixedPointResult fixed_point_solve(const VectorMap& map, std::vector<double> initial,
                                   const FixedPointSpec& spec,
                                   const std::function<void(double)>& on_step) {
  spec.validate();
  std::vector<double> v = std::move(initial);
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < spec.max_iter; ++iter) {
    const std::vector<double> next = map(v);
    if (next.size() != v.size()) {
      throw UsageError(fmt::format("fixed-point map returned dimension {} for input dimension {}",
                                   next.size(), v.size()));
    }
    residual = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) residual = std::max(residual, std::abs(next[i] - v[i]));
    if (std::isnan(residual)) break;
    if (on_step) on_step(residual);
    if (residual < spec.abs_tol) return {std::move(v), iter, residual};
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += spec.mixing * (next[i] - v[i]);
  }
  throw ConvergenceError(
      fmt::format("fixed-point iteration did not converge in {} steps (residual {})",
                  spec.max_iter, residual),
      residual, residual, residual, v);
}

}  // namespace thermalent::numerics
