#pragma once

#include "thermalent/numerics.hpp"
#include "thermalent/pairwise.hpp"

namespace thermalent::xy {

/// Infinite S=1/2 XY chain, H = sum_i (J/2)(S+_i S-_{i+1} + h.c.) - h sum_i S^z_i,
/// at temperature t (k_B = 1). With `zero_temperature` set, t is ignored and
/// every quantity is the closed-form t -> 0+ limit.
struct XYChainParams {
  double j = 1.0;
  double h = 0.0;
  double t = 1.0;
  bool zero_temperature = false;

  static XYChainParams ground_state(double j, double h) { return {j, h, 0.0, true}; }

  void validate() const;
};

struct XYPointResult {
  double z = 0.0;  // <c+_i c_{i+1}>
  double n = 0.0;  // <n_i>
  double x_plus = 0.0;
  double x_minus = 0.0;
  ConcurrenceResult concurrence;
  double phi = 0.0;

  BondObservables bond() const;
};

/// Fermi factor of the mode with cos k = x: 1/(exp((Jx - h)/t) + 1).
double fermi_occupation(double x, const XYChainParams& params);

/// Z = (1/pi) int x f(x) / sqrt(1-x^2) dx.
double hopping_z(const XYChainParams& params, const numerics::QuadratureSpec& quad = {});

/// <n> = (1/pi) int f(x) / sqrt(1-x^2) dx.
double density_n(const XYChainParams& params, const numerics::QuadratureSpec& quad = {});

/// X+ = <n>^2 - Z^2 (Wick factorization of <n_i n_{i+1}>).
double double_occupancy_x_plus(const XYChainParams& params,
                               const numerics::QuadratureSpec& quad = {});

struct EvaluateOptions {
  numerics::QuadratureSpec quadrature{};
  /// Also evaluate the three-integral closed form for c_tilde and require it
  /// to match the bond-observable route to 1e-9. Only applied when z <= 0,
  /// where that form is valid.
  bool verify_integral_form = false;
};

XYPointResult evaluate_point(const XYChainParams& params, const EvaluateOptions& options = {});

/// c_tilde written directly as Fermi integrals with the weights x,
/// sqrt((1+x)/(1-x)) and sqrt((1-x)/(1+x)). Assumes z <= 0.
double c_tilde_integral_form(const XYChainParams& params,
                             const numerics::QuadratureSpec& quad = {});

/// Phi = n + sqrt(2) z + z^2 - n^2; negative iff the bond is entangled (z <= 0).
double phi_indicator(const XYChainParams& params, const numerics::QuadratureSpec& quad = {});

/// Phi from already computed (z, n).
double phi_from_observables(double z, double n);

/// (<S+_i S-_{i+1}> + sqrt(2)/2)^2 < 1/4 + <S^z_i>^2 with <S+S-> = z, <S^z> = n - 1/2.
bool spin_entanglement_condition(double z, double n);

/// Root of Phi(t, h) = 0 for t in [0.1 j, 1.0 j]. At h = 0 the result is
/// cross-checked against critical_temperature_zero_field and must agree to 1e-8.
/// Throws BracketError if Phi has no sign change, i.e. no entangled window.
double critical_temperature(double h, double j, const numerics::QuadratureSpec& quad = {});

/// Zero-field T_c from (sqrt(2)-1)/2 = (J/(pi T)) int_0^1 sqrt(1-x^2)/(1+cosh(Jx/T)) dx.
double critical_temperature_zero_field(double j, const numerics::QuadratureSpec& quad = {});

struct FixedPointIdentity {
  double t_c = 0.0;
  double lhs = 0.0;  // 2 (1 + sqrt(2) Z) dZ/dh
  double rhs = 0.0;  // sqrt(2) (2n - 1) dn/dh
  double residual() const;
};

/// Both sides of dPhi/dh = 0 at T_c(h), with central differences of step delta_h.
FixedPointIdentity fixed_point_identity(double h, double j, double delta_h,
                                        const numerics::QuadratureSpec& quad = {});

double fixed_point_identity_residual(double h, double j, double delta_h,
                                     const numerics::QuadratureSpec& quad = {});

/// Default finite-difference step in h, relative to j.
inline constexpr double kFieldStep = 1e-5;

}  // namespace thermalent::xy
