#include "thermalent/ed_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <lapacke.h>

#include "thermalent/errors.hpp"
#include "thermalent/numerics.hpp"

namespace thermalent::ed {

namespace {

using State = std::uint32_t;

double spin_z(State s, int site) { return ((s >> site) & 1U) ? 0.5 : -0.5; }

double exchange_diagonal(const FiniteChainSpec& spec, State s) {
  double e = 0.0;
  for (const Bond& b : spec.bonds) e += b.j_z * spin_z(s, b.site_i) * spin_z(s, b.site_j);
  return e;
}

double sz_total(State s, int n_sites) { return std::popcount(s) - 0.5 * n_sites; }

bool spins_differ(State s, const Bond& b) {
  return ((s >> b.site_i) & 1U) != ((s >> b.site_j) & 1U);
}

State flip_pair(State s, const Bond& b) { return s ^ (State{1} << b.site_i) ^ (State{1} << b.site_j); }

// Two-site configuration index of (site_i, site_j) in the ordered basis.
int pair_config(State s, int site_i, int site_j) {
  return basis_index(((s >> site_i) & 1U) != 0, ((s >> site_j) & 1U) != 0);
}

State with_pair_config(State s, int site_i, int site_j, int config) {
  const bool up_i = config < 2;
  const bool up_j = (config % 2) == 0;
  s &= ~((State{1} << site_i) | (State{1} << site_j));
  if (up_i) s |= State{1} << site_i;
  if (up_j) s |= State{1} << site_j;
  return s;
}

int pair_up_count(int config) { return (config < 2 ? 1 : 0) + (config % 2 == 0 ? 1 : 0); }

// Dense Hamiltonian on `basis`; `position` maps a state to its row, or -1.
// The field term is included with weight `h`.
Eigen::MatrixXd dense_block(const FiniteChainSpec& spec, std::span<const State> basis,
                            std::span<const int> position, double h) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const State s = basis[r];
    m(r, r) = exchange_diagonal(spec, s) - h * sz_total(s, spec.n_sites);
    for (const Bond& b : spec.bonds) {
      if (!spins_differ(s, b)) continue;
      const int c = position[flip_pair(s, b)];
      m(c, r) += 0.5 * b.j_xy;
    }
  }
  return m;
}

// Eigenvalues ascending in `values`, eigenvectors overwrite `m` column-wise.
void diagonalize(Eigen::MatrixXd& m, Eigen::VectorXd& values) {
  const auto n = static_cast<lapack_int>(m.rows());
  values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, m.data(), n, values.data());
  if (info != 0) throw NumericalError(fmt::format("dsyevd failed with info = {}", info));
}

// Reduced density matrix of every eigenvector (columns of `vectors`) on every
// bond, appended to `out` level by level. With `same_sector_only`, partner
// states are restricted to the same total S^z as the row state. With
// `flipped`, the RDMs of the globally spin-flipped eigenvectors are stored.
void append_rdms(const FiniteChainSpec& spec, std::span<const State> basis,
                 std::span<const int> position, const Eigen::MatrixXd& vectors,
                 bool same_sector_only, bool flipped, std::vector<std::array<double, 16>>& out) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const std::size_t n_bonds = spec.bonds.size();
  const std::size_t first = out.size();
  out.resize(first + static_cast<std::size_t>(dim) * n_bonds);

  const Eigen::MatrixXd rows = vectors.transpose();  // rows.col(r) = amplitudes of basis[r]
  Eigen::ArrayXXd acc(dim, 16);
  for (std::size_t bond = 0; bond < n_bonds; ++bond) {
    const int si = spec.bonds[bond].site_i;
    const int sj = spec.bonds[bond].site_j;
    acc.setZero();
    for (Eigen::Index r = 0; r < dim; ++r) {
      const State s = basis[r];
      const int a = pair_config(s, si, sj);
      for (int b = 0; b < 4; ++b) {
        if (same_sector_only && pair_up_count(a) != pair_up_count(b)) continue;
        const int partner = position[with_pair_config(s, si, sj, b)];
        if (partner < 0) continue;
        acc.col(a * 4 + b) += rows.col(r).array() * rows.col(partner).array();
      }
    }
    for (Eigen::Index level = 0; level < dim; ++level) {
      auto& rdm = out[first + static_cast<std::size_t>(level) * n_bonds + bond];
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          // flipping every spin maps pair config c to 3 - c
          rdm[a * 4 + b] = flipped ? acc(level, (3 - a) * 4 + (3 - b)) : acc(level, a * 4 + b);
        }
      }
    }
  }
}

double coupling_scale(const FiniteChainSpec& spec) {
  double scale = 0.0;
  for (const Bond& b : spec.bonds) scale = std::max({scale, std::abs(b.j_xy), std::abs(b.j_z)});
  return scale;
}

}  // namespace

void FiniteChainSpec::validate() const {
  if (n_sites < kMinSites || n_sites > kMaxSites) {
    throw UsageError(
        fmt::format("chain length {} outside [{}, {}]", n_sites, kMinSites, kMaxSites));
  }
  if (!std::isfinite(h)) throw UsageError("field must be finite");
  std::set<std::pair<int, int>> seen;
  for (const Bond& b : bonds) {
    if (b.site_i < 0 || b.site_i >= n_sites || b.site_j < 0 || b.site_j >= n_sites) {
      throw UsageError(fmt::format("bond ({}, {}) out of range for N = {}", b.site_i, b.site_j,
                                   n_sites));
    }
    if (b.site_i == b.site_j) throw UsageError(fmt::format("self bond on site {}", b.site_i));
    if (!seen.emplace(std::minmax(b.site_i, b.site_j)).second) {
      throw UsageError(fmt::format("bond ({}, {}) listed twice", b.site_i, b.site_j));
    }
  }
}

std::size_t FiniteChainSpec::middle_bond() const {
  const std::pair wanted{n_sites / 2 - 1, n_sites / 2};
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    const std::pair bond{std::min(bonds[i].site_i, bonds[i].site_j),
                         std::max(bonds[i].site_i, bonds[i].site_j)};
    if (bond == wanted) return i;
  }
  throw UsageError(fmt::format("no bond joins the middle sites {} and {}", wanted.first,
                               wanted.second));
}

namespace {

FiniteChainSpec uniform_chain(int n_sites, double j_xy, double j_z, double h, Boundary boundary) {
  FiniteChainSpec spec{n_sites, {}, h, boundary};
  for (int i = 0; i + 1 < n_sites; ++i) spec.bonds.push_back({i, i + 1, j_xy, j_z});
  if (boundary == Boundary::periodic && n_sites > 2)
    spec.bonds.push_back({n_sites - 1, 0, j_xy, j_z});
  spec.validate();
  return spec;
}

}  // namespace

FiniteChainSpec FiniteChainSpec::xy_chain(int n_sites, double j, double h, Boundary boundary) {
  return uniform_chain(n_sites, j, 0.0, h, boundary);
}

FiniteChainSpec FiniteChainSpec::heisenberg_chain(int n_sites, double j, double h,
                                                  Boundary boundary) {
  return uniform_chain(n_sites, j, j, h, boundary);
}

FiniteChainSpec FiniteChainSpec::alternating_chain(int n_sites, double j_a, double j_f, double h,
                                                   Boundary boundary) {
  FiniteChainSpec spec{n_sites, {}, h, boundary};
  for (int i = 0; i + 1 < n_sites; ++i) {
    const double j = (i % 2 == 0) ? j_a : j_f;
    spec.bonds.push_back({i, i + 1, j, j});
  }
  if (boundary == Boundary::periodic && n_sites > 2) {
    const double j = ((n_sites - 1) % 2 == 0) ? j_a : j_f;
    spec.bonds.push_back({n_sites - 1, 0, j, j});
  }
  spec.validate();
  return spec;
}

Eigen::SparseMatrix<double> build_hamiltonian(const FiniteChainSpec& spec) {
  spec.validate();
  const State dim = State{1} << spec.n_sites;
  std::vector<Eigen::Triplet<double>> entries;
  for (State s = 0; s < dim; ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    entries.emplace_back(r, r, exchange_diagonal(spec, s) - spec.h * sz_total(s, spec.n_sites));
    for (const Bond& b : spec.bonds) {
      if (spins_differ(s, b))
        entries.emplace_back(static_cast<Eigen::Index>(flip_pair(s, b)), r, 0.5 * b.j_xy);
    }
  }
  Eigen::SparseMatrix<double> h(dim, dim);
  h.setFromTriplets(entries.begin(), entries.end());
  return h;
}

Eigen::SparseMatrix<double> total_sz(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxSites) throw UsageError("chain length out of range");
  const State dim = State{1} << n_sites;
  Eigen::SparseMatrix<double> sz(dim, dim);
  std::vector<Eigen::Triplet<double>> entries;
  for (State s = 0; s < dim; ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    entries.emplace_back(r, r, sz_total(s, n_sites));
  }
  sz.setFromTriplets(entries.begin(), entries.end());
  return sz;
}

ChainSpectrum::ChainSpectrum(FiniteChainSpec spec, Blocking blocking) : spec_(std::move(spec)) {
  spec_.validate();
  const int n = spec_.n_sites;
  const State dim = State{1} << n;
  energies_.reserve(dim);
  sz_.reserve(dim);

  if (blocking == Blocking::none) {
    if (n > kMaxUnblockedSites) {
      throw UsageError(fmt::format("unblocked diagonalization limited to N <= {}, got {}",
                                   kMaxUnblockedSites, n));
    }
    std::vector<State> basis(dim);
    std::vector<int> position(dim);
    for (State s = 0; s < dim; ++s) {
      basis[s] = s;
      position[s] = static_cast<int>(s);
    }
    Eigen::MatrixXd vectors = dense_block(spec_, basis, position, spec_.h);
    Eigen::VectorXd values;
    diagonalize(vectors, values);
    Eigen::VectorXd sz_diag(dim);
    for (State s = 0; s < dim; ++s) sz_diag(s) = sz_total(s, n);
    for (Eigen::Index level = 0; level < values.size(); ++level) {
      energies_.push_back(values(level));
      sz_.push_back(vectors.col(level).array().square().matrix().dot(sz_diag));
    }
    append_rdms(spec_, basis, position, vectors, false, false, rdm_);
  } else {
    // Sectors of fixed up-spin count k. The zero-field exchange part is
    // invariant under a global spin flip, so sector N - k is the flipped
    // copy of sector k and only k <= N/2 is diagonalized.
    std::vector<std::vector<State>> sectors(n + 1);
    std::vector<int> position(dim, -1);
    for (State s = 0; s < dim; ++s) {
      auto& sector = sectors[std::popcount(s)];
      position[s] = static_cast<int>(sector.size());
      sector.push_back(s);
    }
    for (int k = 0; 2 * k <= n; ++k) {
      Eigen::MatrixXd vectors = dense_block(spec_, sectors[k], position, 0.0);
      Eigen::VectorXd values;
      diagonalize(vectors, values);

      const double sz = k - 0.5 * n;
      for (Eigen::Index level = 0; level < values.size(); ++level) {
        energies_.push_back(values(level) - spec_.h * sz);
        sz_.push_back(sz);
      }
      append_rdms(spec_, sectors[k], position, vectors, true, false, rdm_);
      if (2 * k != n) {
        for (Eigen::Index level = 0; level < values.size(); ++level) {
          energies_.push_back(values(level) + spec_.h * sz);
          sz_.push_back(-sz);
        }
        append_rdms(spec_, sectors[k], position, vectors, true, true, rdm_);
      }
    }
  }
  ground_energy_ = *std::min_element(energies_.begin(), energies_.end());
}

ThermalEDResult ChainSpectrum::thermal(double t) const {
  if (!(t > 0.0)) throw UsageError(fmt::format("temperature must be positive, got {}", t));
  const std::size_t n_bonds = spec_.bonds.size();
  double weight_sum = 0.0;
  double energy_sum = 0.0;
  double sz_sum = 0.0;
  std::vector<double> rdm_sum(n_bonds * 16, 0.0);
  for (std::size_t level = 0; level < energies_.size(); ++level) {
    const double w = std::exp(-(energies_[level] - ground_energy_) / t);
    if (w == 0.0) continue;
    weight_sum += w;
    energy_sum += w * energies_[level];
    sz_sum += w * sz_[level];
    for (std::size_t bond = 0; bond < n_bonds; ++bond) {
      const auto& rdm = rdm_[level * n_bonds + bond];
      for (int e = 0; e < 16; ++e) rdm_sum[bond * 16 + e] += w * rdm[e];
    }
  }

  ThermalEDResult out;
  out.t = t;
  out.u = energy_sum / weight_sum;
  out.m = sz_sum / weight_sum;
  out.partition_log = std::log(weight_sum) - ground_energy_ / t;
  out.per_bond.reserve(n_bonds);
  out.reduced.reserve(n_bonds);
  for (std::size_t bond = 0; bond < n_bonds; ++bond) {
    Matrix4c m;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) m(a, b) = rdm_sum[bond * 16 + a * 4 + b] / weight_sum;
    }
    out.reduced.emplace_back(m);
    out.per_bond.push_back({.x_plus = m(0, 0).real(),
                            .y_plus = m(1, 1).real(),
                            .y_minus = m(2, 2).real(),
                            .z = m(2, 1),
                            .x_minus = m(3, 3).real()});
  }
  return out;
}

ThermalEDResult thermal_expectations(const FiniteChainSpec& spec, double t) {
  return ChainSpectrum(spec).thermal(t);
}

ConcurrenceResult bond_concurrence(const ThermalEDResult& result, std::size_t bond_index) {
  if (bond_index >= result.reduced.size()) {
    throw UsageError(fmt::format("bond index {} out of range ({} bonds)", bond_index,
                                 result.reduced.size()));
  }
  return wootters_concurrence(result.reduced[bond_index]);
}

std::optional<double> critical_temperature_ed(const ChainSpectrum& spectrum,
                                              std::size_t bond_index, const ScanSpec& scan) {
  if (scan.points < 2 || !(scan.t_min > 0.0) || !(scan.t_max > scan.t_min))
    throw UsageError("temperature scan needs t_max > t_min > 0 and at least two points");
  const double scale = coupling_scale(spectrum.spec());
  if (!(scale > 0.0)) throw UsageError("chain has no nonzero coupling");

  const auto c_tilde = [&](double t) {
    return bond_concurrence(spectrum.thermal(t), bond_index).c_tilde;
  };
  std::vector<double> ts(scan.points);
  std::vector<double> cs(scan.points);
  for (int k = 0; k < scan.points; ++k) {
    ts[k] = scale * (scan.t_min + (scan.t_max - scan.t_min) * k / (scan.points - 1));
    cs[k] = c_tilde(ts[k]);
  }
  if (cs.back() > 0.0) {
    throw BracketError(fmt::format("bond {} still entangled at the top of the scan, t = {}",
                                   bond_index, ts.back()),
                       ts.front(), ts.back(), cs.front(), cs.back());
  }
  for (int k = scan.points - 1; k > 0; --k) {
    if (cs[k - 1] > 0.0 && cs[k] <= 0.0) {
      return numerics::find_root_bracketed(
          c_tilde, {.lo = ts[k - 1], .hi = ts[k], .abs_tol = scan.abs_tol * scale});
    }
  }
  return std::nullopt;
}

std::optional<double> critical_temperature_ed(const FiniteChainSpec& spec, std::size_t bond_index,
                                              const ScanSpec& scan) {
  return critical_temperature_ed(ChainSpectrum(spec), bond_index, scan);
}

}  // namespace thermalent::ed
