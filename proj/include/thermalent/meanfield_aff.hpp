#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

#include "thermalent/numerics.hpp"
#include "thermalent/pairwise.hpp"

namespace thermalent::meanfield {

/// Alternating chain H = sum_j (J_a S_{2j-1}.S_{2j} + J_f S_{2j}.S_{2j+1}) - h sum S^z,
/// with J_a > 0 > J_f. After Jordan-Wigner, site 2j-1 is fermion a_j and
/// site 2j is b_j; the unit cell has length 1 and b sits half a cell to the
/// right of a.
struct AlternatingParams {
  double j_a = 1.0;
  double j_f = -1.0;
  double h = 0.0;
  double t = 0.1;
  int n_k = 2048;

  void validate() const;
};

/// Hartree-Fock order parameters: d_a = <a+a>, d_b = <b+b>,
/// p_ab = <b+_j a_j> (AF bond), p_ba = <a+_{j+1} b_j> (F bond).
struct MeanFieldState {
  double d_a = 0.5;
  double d_b = 0.5;
  Complex p_ab{0.3, 0.0};
  Complex p_ba{0.1, 0.0};
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
  int n_k = 0;  // mesh the state was converged on

  /// Default symmetry-breaking seed d_a = d_b = 1/2, p_ab = 0.3, p_ba = 0.1.
  static MeanFieldState seed() { return {}; }
};

using Matrix2c = Eigen::Matrix<Complex, 2, 2>;

/// Bloch Hamiltonian in the (a_k, b_k) basis.
Matrix2c hf_hamiltonian_k(const MeanFieldState& state, const AlternatingParams& params, double k);

/// Quasiparticle energies (lower, upper) of hf_hamiltonian_k.
std::pair<double, double> quasiparticle_bands(const MeanFieldState& state,
                                              const AlternatingParams& params, double k);

/// One self-consistency step: occupy the bands of `state` at temperature
/// params.t and return the resulting (d_a, d_b, p_ab, p_ba). The k sum runs
/// over n_k uniform points of [-pi, pi) in fixed order.
MeanFieldState mean_field_map(const MeanFieldState& state, const AlternatingParams& params);

struct SolveOptions {
  numerics::FixedPointSpec iteration{.mixing = 0.5, .abs_tol = 1e-10, .max_iter = 20000};
  /// On non-convergence the mixing is halved and the solve restarted.
  int max_restarts = 4;
  /// Double n_k until the order parameters move less than mesh_tol.
  bool refine_mesh = true;
  double mesh_tol = 1e-10;
  int max_n_k = 1 << 16;
};

/// Damped self-consistent iteration from `initial`. Throws ConvergenceError
/// (carrying the final residual and state) once all restarts are used.
MeanFieldState self_consistent_solve(const AlternatingParams& params,
                                     const MeanFieldState& initial = MeanFieldState::seed(),
                                     const SolveOptions& options = {});

struct MFResult {
  MeanFieldState state;
  ConcurrenceResult c_a;  // bond a_j - b_j (J_a)
  ConcurrenceResult c_f;  // bond b_j - a_{j+1} (J_f)
  std::function<double(double)> band_minus;
  std::function<double(double)> band_plus;
};

/// Bond observables of the AF bond (Z = conj(p_ab)) and F bond (Z = conj(p_ba)),
/// with <n n> = d_a d_b - |Z|^2 by Wick factorization.
BondObservables af_bond(const MeanFieldState& state);
BondObservables f_bond(const MeanFieldState& state);

MFResult mf_concurrences(const MeanFieldState& state, const AlternatingParams& params);

enum class BondKind { a, f };

/// Residuals of the critical-point conditions evaluated at a state.
struct CriticalIdentities {
  /// d - d^2 + sqrt(2) q + q^2 with d = d_a and q = -|p| the bond hopping in
  /// the antiferromagnetic sign convention.
  double reduced_form = 0.0;
  /// [|p|^2 - d_a(d_b-1)][|p|^2 - d_b(d_a-1)] - 2|p|^2
  double product_form_symmetric = 0.0;
  /// [|p|^2 - d_a(d_b-1)]^2 - 2|p|^2, the form with both brackets equal.
  double product_form_repeated = 0.0;
};

CriticalIdentities critical_identities(const MeanFieldState& state, BondKind bond);

struct CriticalPoint {
  double t_c = 0.0;
  MeanFieldState state;  // converged state at t_c
  CriticalIdentities identities;
};

/// Temperature grid for locating sign changes of c_tilde, in units of j_a.
struct TemperatureScan {
  double t_min = 0.02;
  double t_max = 1.5;
  int points = 75;
  double abs_tol = 1e-11;
};

/// Upper zero of the bond's c_tilde(t) at fixed field, found by a warm-started
/// temperature sweep and Brent refinement; nullopt if the bond is never
/// entangled on the scan. params.t is ignored.
std::optional<CriticalPoint> mf_critical_temperature(const AlternatingParams& params,
                                                     BondKind bond,
                                                     const TemperatureScan& scan = {},
                                                     const SolveOptions& options = {});

}  // namespace thermalent::meanfield
