#pragma once

namespace thermalent::witness {

/// Which Hamiltonian the internal energy U refers to.
///
/// `spin_hamiltonian`: U = <H> for H = sum (J/2)(S+S- + h.c.) - h sum S^z, the
/// quantity a calorimeter (or the ED oracle) reports. Then Z = (U + M h)/(N J).
///
/// `fermion_hamiltonian`: U = <sum_k (J cos k - h) n_k>, the free-fermion form
/// that drops the constant -N h/2. Then Z = (U + M h)/(N J) + h/(2J).
///
/// The two agree at h = 0.
enum class EnergyReference { spin_hamiltonian, fermion_hamiltonian };

/// Extensive measured quantities of an N-site XY chain.
struct MacroObservables {
  double u = 0.0;  // internal energy
  double m = 0.0;  // total magnetization sum <S^z>, positive along the field
  int n_sites = 2;
  double j = 1.0;
  double h = 0.0;
  EnergyReference energy_reference = EnergyReference::spin_hamiltonian;

  void validate() const;

  /// Nearest-neighbour hopping <S+_i S-_{i+1}> inferred from (U, M).
  double hopping() const;
};

/// Phi(U, M, h) = (Z + sqrt(2)/2)^2 - (M/N)^2 - 1/4 with Z = hopping().
/// A negative value witnesses an entangled thermal state.
double thermal_witness(const MacroObservables& obs);

/// Zero-field criterion |U|/(N J) > (sqrt(2) - 1)/2.
bool zero_field_energy_criterion(double u, int n_sites, double j);

/// Older sufficient condition |U|/(N J) > 1/4, kept for comparison.
bool quarter_energy_criterion(double u, int n_sites, double j);

inline constexpr double kZeroFieldThreshold = 0.20710678118654752;  // (sqrt(2)-1)/2

}  // namespace thermalent::witness
