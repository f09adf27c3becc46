#include "thermalent/pairwise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "thermalent/errors.hpp"

namespace thermalent {

TwoQubitDensityMatrix::TwoQubitDensityMatrix(const Matrix4c& entries, double tol)
    : entries_(entries) {
  const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) throw InvalidStateError(fmt::format("density matrix not Hermitian ({})", asym));
  const Complex trace = entries.trace();
  if (std::abs(trace - 1.0) > tol)
    throw InvalidStateError(fmt::format("density matrix trace {} != 1", trace.real()));
  const Eigen::SelfAdjointEigenSolver<Matrix4c> solver(entries, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues().minCoeff();
  if (lowest < -tol)
    throw InvalidStateError(fmt::format("density matrix has eigenvalue {}", lowest));
}

BondObservables BondObservables::from_densities(double n_i, double n_j, Complex z, double x_plus) {
  return {.x_plus = x_plus,
          .y_plus = n_i - x_plus,
          .y_minus = n_j - x_plus,
          .z = z,
          .x_minus = 1.0 - n_i - n_j + x_plus};
}

void BondObservables::validate(double tol) const {
  for (double p : {x_plus, y_plus, y_minus, x_minus}) {
    if (p < -tol || p > 1.0 + tol)
      throw InvalidStateError(fmt::format("bond population {} outside [0,1]", p));
  }
  const double trace = x_plus + y_plus + y_minus + x_minus;
  if (std::abs(trace - 1.0) > tol)
    throw InvalidStateError(fmt::format("bond populations sum to {}", trace));
  if (std::norm(z) > y_plus * y_minus + tol)
    throw InvalidStateError(
        fmt::format("|z|^2 = {} exceeds y_plus*y_minus = {}", std::norm(z), y_plus * y_minus));
}

namespace {

ConcurrenceResult from_c_tilde(double c_tilde) { return {c_tilde, std::max(0.0, c_tilde)}; }

}  // namespace

ConcurrenceResult wootters_concurrence(const TwoQubitDensityMatrix& rho) {
  // sy x sy is real and antidiagonal with signs (-1, 1, 1, -1).
  Matrix4c flip = Matrix4c::Zero();
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const Matrix4c& m = rho.matrix();
  const Matrix4c spin_flipped = flip * m.conjugate() * flip;
  const Matrix4c product = m * spin_flipped;

  const Eigen::ComplexEigenSolver<Matrix4c> solver(product, false);
  std::array<double, 4> mu{};
  for (int i = 0; i < 4; ++i) {
    const double lambda = solver.eigenvalues()(i).real();
    if (lambda < -kPositivityTolerance)
      throw InvalidStateError(fmt::format("rho*rho_tilde has eigenvalue {}", lambda));
    mu[i] = std::sqrt(std::max(0.0, lambda));
  }
  std::sort(mu.begin(), mu.end(), std::greater<>());
  return from_c_tilde(mu[0] - mu[1] - mu[2] - mu[3]);
}

ConcurrenceResult xstate_concurrence(const BondObservables& b) {
  const double product = b.x_plus * b.x_minus;
  if (product < -kPositivityTolerance)
    throw InvalidStateError(fmt::format("x_plus*x_minus = {} is negative", product));
  return from_c_tilde(2.0 * (std::abs(b.z) - std::sqrt(std::max(0.0, product))));
}

TwoQubitDensityMatrix bond_observables_to_density_matrix(const BondObservables& b) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = b.x_plus;
  m(1, 1) = b.y_plus;
  m(2, 2) = b.y_minus;
  m(3, 3) = b.x_minus;
  // <down-up| rho |up-down> = <S^+_i S^-_j> = z
  m(2, 1) = b.z;
  m(1, 2) = std::conj(b.z);
  return TwoQubitDensityMatrix(m);
}

}  // namespace thermalent
