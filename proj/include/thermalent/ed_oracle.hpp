#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "thermalent/pairwise.hpp"

namespace thermalent::ed {

inline constexpr int kMinSites = 2;
inline constexpr int kMaxSites = 14;
/// Largest chain accepted without S^z blocking (dense 2^N x 2^N eigenproblem).
inline constexpr int kMaxUnblockedSites = 12;

enum class Boundary { open, periodic };

/// One exchange term j_xy (S^x_i S^x_j + S^y_i S^y_j) + j_z S^z_i S^z_j.
struct Bond {
  int site_i = 0;
  int site_j = 1;
  double j_xy = 1.0;
  double j_z = 0.0;
};

/// Finite S=1/2 chain with per-bond XXZ couplings in a uniform field,
/// H = sum_bonds [...] - h sum_i S^z_i. Site i maps to bit i of a basis
/// state; a set bit is spin up.
struct FiniteChainSpec {
  int n_sites = 2;
  std::vector<Bond> bonds;
  double h = 0.0;
  Boundary boundary = Boundary::open;

  /// Throws UsageError for N outside [2, 14], bad site indices, self-bonds
  /// or a bond listed twice.
  void validate() const;

  /// Bond index joining sites (N/2 - 1, N/2); the bulk-like bond of an open chain.
  std::size_t middle_bond() const;

  /// Uniform XY chain (j_z = 0). A periodic chain gets the wrap bond
  /// (N-1, 0) only for N > 2, so a pair is never double counted.
  static FiniteChainSpec xy_chain(int n_sites, double j, double h,
                                  Boundary boundary = Boundary::open);
  static FiniteChainSpec heisenberg_chain(int n_sites, double j, double h,
                                          Boundary boundary = Boundary::open);
  /// Bonds alternate j_a (sites 0-1, 2-3, ...) and j_f (1-2, 3-4, ...),
  /// Heisenberg type (j_xy = j_z).
  static FiniteChainSpec alternating_chain(int n_sites, double j_a, double j_f, double h,
                                           Boundary boundary = Boundary::open);
};

/// Full Hamiltonian in the 2^N computational basis.
Eigen::SparseMatrix<double> build_hamiltonian(const FiniteChainSpec& spec);

/// Total S^z, diagonal in the computational basis.
Eigen::SparseMatrix<double> total_sz(int n_sites);

struct ThermalEDResult {
  double t = 0.0;
  double u = 0.0;  // <H>
  double m = 0.0;  // sum_i <S^z_i>
  double partition_log = 0.0;
  /// X-state entries of each bond's reduced density matrix, in the spec's bond order.
  std::vector<BondObservables> per_bond;
  /// Full 4x4 reduced density matrices, all sixteen operator products.
  std::vector<TwoQubitDensityMatrix> reduced;
};

enum class Blocking { sz_sectors, none };

/// Complete eigendecomposition of a finite chain, reduced to what thermal
/// averages need: energies, <S^z_total> and the two-site reduced density
/// matrix of every eigenstate on every bond. Immutable after construction,
/// so one instance may serve many temperatures concurrently.
class ChainSpectrum {
 public:
  explicit ChainSpectrum(FiniteChainSpec spec, Blocking blocking = Blocking::sz_sectors);

  const FiniteChainSpec& spec() const { return spec_; }
  std::span<const double> energies() const { return energies_; }
  double ground_energy() const { return ground_energy_; }

  ThermalEDResult thermal(double t) const;

 private:
  using Rdm = std::array<double, 16>;

  FiniteChainSpec spec_;
  std::vector<double> energies_;
  std::vector<double> sz_;
  std::vector<Rdm> rdm_;  // [level * bonds + bond], row-major 4x4
  double ground_energy_ = 0.0;
};

ThermalEDResult thermal_expectations(const FiniteChainSpec& spec, double t);

/// Wootters concurrence of the full reduced density matrix of one bond.
ConcurrenceResult bond_concurrence(const ThermalEDResult& result, std::size_t bond_index);

/// Temperature window searched for the upper zero of c_tilde(t), in units of
/// the largest coupling magnitude.
struct ScanSpec {
  double t_min = 0.02;
  double t_max = 2.0;
  int points = 200;
  double abs_tol = 1e-12;
};

/// Highest temperature at which c_tilde changes from positive to
/// non-positive; nullopt when c_tilde <= 0 on the whole scan.
std::optional<double> critical_temperature_ed(const ChainSpectrum& spectrum,
                                              std::size_t bond_index, const ScanSpec& scan = {});
std::optional<double> critical_temperature_ed(const FiniteChainSpec& spec, std::size_t bond_index,
                                              const ScanSpec& scan = {});

}  // namespace thermalent::ed
