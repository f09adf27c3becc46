#include "thermalent/xy_exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "thermalent/errors.hpp"

namespace thermalent::xy {

using numerics::integrate_chebyshev_weight;
using numerics::QuadratureSpec;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

constexpr double kRouteAgreement = 1e-9;
constexpr double kZeroFieldAgreement = 1e-8;

// Band edge position h/J clamped to the band, for the t -> 0 limit.
double fermi_level(const XYChainParams& p) { return std::clamp(p.h / p.j, -1.0, 1.0); }

}  // namespace

void XYChainParams::validate() const {
  if (!(j > 0.0)) throw UsageError(fmt::format("XY coupling j must be positive, got {}", j));
  if (!std::isfinite(h)) throw UsageError("XY field h must be finite");
  if (!zero_temperature && !(t > 0.0))
    throw UsageError(fmt::format("temperature must be positive, got {}", t));
}

BondObservables XYPointResult::bond() const {
  BondObservables b = BondObservables::from_densities(n, n, z, x_plus);
  b.x_minus = x_minus;
  return b;
}

double fermi_occupation(double x, const XYChainParams& params) {
  const double energy = params.j * x - params.h;
  if (params.zero_temperature) {
    if (energy < 0.0) return 1.0;
    return energy > 0.0 ? 0.0 : 0.5;
  }
  const double arg = energy / params.t;
  if (arg > 0.0) {
    const double e = std::exp(-arg);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(arg));
}

double hopping_z(const XYChainParams& params, const QuadratureSpec& quad) {
  params.validate();
  if (params.zero_temperature) {
    // (1/pi) int_{-1}^{c} x/sqrt(1-x^2) dx
    const double c = fermi_level(params);
    return -std::sqrt(1.0 - c * c) / pi;
  }
  return integrate_chebyshev_weight([&](double x) { return x * fermi_occupation(x, params); },
                                    quad) /
         pi;
}

double density_n(const XYChainParams& params, const QuadratureSpec& quad) {
  params.validate();
  if (params.zero_temperature) return 1.0 - std::acos(fermi_level(params)) / pi;
  return integrate_chebyshev_weight([&](double x) { return fermi_occupation(x, params); }, quad) /
         pi;
}

namespace {

// Z, n and 1 - n. Above half filling the integrals run over holes, 1 - f,
// so that n (1 - n) and Z keep their relative accuracy deep in the
// polarized regime instead of cancelling against 1.
struct Moments {
  double z;
  double n;
  double holes;
};

Moments moments(const XYChainParams& params, const QuadratureSpec& quad) {
  params.validate();
  if (params.zero_temperature) {
    const double n = density_n(params, quad);
    return {hopping_z(params, quad), n, 1.0 - n};
  }
  const bool use_holes = params.h > 0.0;
  XYChainParams mirrored = params;
  mirrored.h = -params.h;
  // 1 - f(x; h) = f(-x; -h)
  const auto minority = [&](double x) {
    return use_holes ? fermi_occupation(-x, mirrored) : fermi_occupation(x, params);
  };
  const double small = integrate_chebyshev_weight(minority, quad) / pi;
  const double first = integrate_chebyshev_weight([&](double x) { return x * minority(x); }, quad) / pi;
  if (use_holes) return {-first, 1.0 - small, small};
  return {first, small, 1.0 - small};
}

double x_plus_from(double z, double n) {
  const double x_plus = n * n - z * z;
  if (x_plus < -kPositivityTolerance)
    throw InvalidStateError(fmt::format("X+ = n^2 - Z^2 = {} is negative", x_plus));
  return std::max(0.0, x_plus);
}

}  // namespace

double double_occupancy_x_plus(const XYChainParams& params, const QuadratureSpec& quad) {
  return x_plus_from(hopping_z(params, quad), density_n(params, quad));
}

double phi_from_observables(double z, double n) { return n + sqrt2 * z + z * z - n * n; }

bool spin_entanglement_condition(double z, double n) {
  const double sz = n - 0.5;
  const double lhs = z + sqrt2 / 2.0;
  return lhs * lhs < 0.25 + sz * sz;
}

double c_tilde_integral_form(const XYChainParams& params, const QuadratureSpec& quad) {
  params.validate();
  double weighted_x;
  double plus;
  double minus;
  if (params.zero_temperature) {
    const double z = hopping_z(params, quad);
    const double n = density_n(params, quad);
    weighted_x = pi * z;
    plus = pi * (n + z);
    minus = pi * (n - z);
  } else {
    const auto f = [&](double x) { return fermi_occupation(x, params); };
    weighted_x = integrate_chebyshev_weight([&](double x) { return x * f(x); }, quad);
    // sqrt((1+x)/(1-x)) = (1+x)/sqrt(1-x^2), and likewise for the other weight
    plus = integrate_chebyshev_weight([&](double x) { return (1.0 + x) * f(x); }, quad);
    minus = integrate_chebyshev_weight([&](double x) { return (1.0 - x) * f(x); }, quad);
  }
  const double holes = (plus / pi - 1.0) * (minus / pi - 1.0);
  return -2.0 / pi *
         (weighted_x + std::sqrt(std::max(0.0, plus * minus)) * std::sqrt(std::max(0.0, holes)));
}

namespace {

double phi_from_moments(const Moments& m) { return m.n * m.holes + sqrt2 * m.z + m.z * m.z; }

}  // namespace

XYPointResult evaluate_point(const XYChainParams& params, const EvaluateOptions& options) {
  const Moments m = moments(params, options.quadrature);
  XYPointResult r;
  r.z = m.z;
  r.n = m.n;
  r.x_plus = x_plus_from(r.z, r.n);
  // (1-n)^2 - Z^2 without the cancellation in 1 - 2n + X+
  r.x_minus = std::max(0.0, m.holes * m.holes - r.z * r.z);
  r.concurrence = xstate_concurrence(r.bond());
  r.phi = phi_from_moments(m);

  if (options.verify_integral_form && r.z <= 0.0) {
    const double direct = c_tilde_integral_form(params, options.quadrature);
    if (std::abs(direct - r.concurrence.c_tilde) > kRouteAgreement) {
      throw InvalidStateError(fmt::format(
          "c_tilde routes disagree at t={}, h={}: observables {} vs integrals {}", params.t,
          params.h, r.concurrence.c_tilde, direct));
    }
  }
  return r;
}

double phi_indicator(const XYChainParams& params, const QuadratureSpec& quad) {
  return phi_from_moments(moments(params, quad));
}

double critical_temperature_zero_field(double j, const QuadratureSpec& quad) {
  if (!(j > 0.0)) throw UsageError("j must be positive");
  const double target = (sqrt2 - 1.0) / 2.0;
  const auto equation = [&](double t) {
    const double beta_j = j / t;
    // the integrand is even, so int_0^1 = (1/2) int_{-1}^{1}
    const double integral =
        0.5 * integrate_chebyshev_weight(
                  [&](double x) { return (1.0 - x * x) / (1.0 + std::cosh(beta_j * x)); }, quad);
    return beta_j / pi * integral - target;
  };
  return numerics::find_root_bracketed(equation, {.lo = 0.1 * j, .hi = 1.0 * j, .abs_tol = 1e-13 * j});
}

double critical_temperature(double h, double j, const QuadratureSpec& quad) {
  if (!(j > 0.0)) throw UsageError("j must be positive");
  const auto phi = [&](double t) { return phi_indicator({j, h, t, false}, quad); };
  const double t_c =
      numerics::find_root_bracketed(phi, {.lo = 0.1 * j, .hi = 1.0 * j, .abs_tol = 1e-13 * j});
  if (h == 0.0) {
    const double other = critical_temperature_zero_field(j, quad);
    if (std::abs(other - t_c) > kZeroFieldAgreement * j) {
      throw InvalidStateError(fmt::format(
          "zero-field T_c routes disagree: Phi root {} vs integral equation {}", t_c, other));
    }
  }
  return t_c;
}

double FixedPointIdentity::residual() const { return std::abs(lhs - rhs); }

FixedPointIdentity fixed_point_identity(double h, double j, double delta_h,
                                        const QuadratureSpec& quad) {
  if (!(delta_h > 0.0)) throw UsageError("delta_h must be positive");
  FixedPointIdentity out;
  out.t_c = critical_temperature(h, j, quad);
  const XYChainParams at{j, h, out.t_c, false};
  const XYChainParams up{j, h + delta_h, out.t_c, false};
  const XYChainParams down{j, h - delta_h, out.t_c, false};
  const double z = hopping_z(at, quad);
  const double n = density_n(at, quad);
  const double dz = (hopping_z(up, quad) - hopping_z(down, quad)) / (2.0 * delta_h);
  const double dn = (density_n(up, quad) - density_n(down, quad)) / (2.0 * delta_h);
  out.lhs = 2.0 * (1.0 + sqrt2 * z) * dz;
  out.rhs = sqrt2 * (2.0 * n - 1.0) * dn;
  return out;
}

double fixed_point_identity_residual(double h, double j, double delta_h,
                                     const QuadratureSpec& quad) {
  return fixed_point_identity(h, j, delta_h, quad).residual();
}

}  // namespace thermalent::xy
