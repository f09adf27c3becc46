#pragma once

#include <complex>

#include <Eigen/Core>

namespace thermalent {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

/// Eigenvalues of rho (and of rho*rho_tilde) above -kPositivityTolerance
/// are treated as rounding noise and clamped to zero.
inline constexpr double kPositivityTolerance = 1e-9;

/// Index into the ordered two-spin basis {up-up, up-down, down-up, down-down}.
///
/// Fermion-spin dictionary used by every module: an occupied Jordan-Wigner
/// mode is spin up (S^z = n - 1/2), so site occupations (n_i, n_j) = (1, 0)
/// label the basis state up-down, index 1.
constexpr int basis_index(bool up_i, bool up_j) { return (up_i ? 0 : 2) + (up_j ? 0 : 1); }

/// Two-qubit density matrix in the ordered basis above. Construction
/// validates Hermiticity, unit trace and positivity.
class TwoQubitDensityMatrix {
 public:
  explicit TwoQubitDensityMatrix(const Matrix4c& entries, double tol = kPositivityTolerance);

  const Matrix4c& matrix() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

 private:
  Matrix4c entries_;
};

/// The five independent entries of a U(1)-symmetric (X-state) two-site
/// density matrix:
///
///   [ x_plus   0        0        0       ]
///   [ 0        y_plus   conj(z)  0       ]
///   [ 0        z        y_minus  0       ]
///   [ 0        0        0        x_minus ]
///
/// with x_plus = <n_i n_j>, y_plus = <n_i (1 - n_j)>, y_minus = <n_j (1 - n_i)>,
/// z = <c_i^dag c_j> = <S^+_i S^-_j> and x_minus = <(1 - n_i)(1 - n_j)>.
struct BondObservables {
  double x_plus = 0.0;
  double y_plus = 0.0;
  double y_minus = 0.0;
  Complex z{};
  double x_minus = 0.0;

  /// Builds the entries from site densities, hopping and <n_i n_j>.
  static BondObservables from_densities(double n_i, double n_j, Complex z, double x_plus);

  double n_i() const { return x_plus + y_plus; }
  double n_j() const { return x_plus + y_minus; }

  /// Throws InvalidStateError if a population leaves [0,1], the trace
  /// differs from 1, or |z|^2 > y_plus*y_minus, each beyond `tol`.
  void validate(double tol = kPositivityTolerance) const;
};

struct ConcurrenceResult {
  double c_tilde = 0.0;  // mu1 - mu2 - mu3 - mu4, before clamping
  double c = 0.0;        // max(0, c_tilde)
};

/// Wootters concurrence from the square roots of the eigenvalues of
/// rho * (sy x sy) rho^* (sy x sy).
ConcurrenceResult wootters_concurrence(const TwoQubitDensityMatrix& rho);

/// Closed form for X-states: c_tilde = 2(|z| - sqrt(x_plus * x_minus)).
ConcurrenceResult xstate_concurrence(const BondObservables& b);

TwoQubitDensityMatrix bond_observables_to_density_matrix(const BondObservables& b);

}  // namespace thermalent
