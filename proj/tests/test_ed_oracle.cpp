#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "thermalent/ed_oracle.hpp"
#include "thermalent/errors.hpp"

using namespace thermalent;
using namespace thermalent::ed;

namespace {

// Open XY chain as free fermions: one-body matrix with J/2 hopping and -h
// on-site, correlation matrix G = f(h1).
struct FreeFermions {
  Eigen::MatrixXd g;
  double energy = 0.0;
};

FreeFermions free_fermion_oracle(int n, double j, double h, double t) {
  Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) h1(i, i + 1) = h1(i + 1, i) = j / 2;
  h1.diagonal().setConstant(-h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h1);
  Eigen::VectorXd occ(n);
  for (int k = 0; k < n; ++k) occ[k] = 1.0 / (std::exp(es.eigenvalues()[k] / t) + 1.0);
  FreeFermions out;
  out.g = es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().transpose();
  // -h sum S^z = -h sum n + N h / 2
  out.energy = es.eigenvalues().dot(occ) + n * h / 2;
  return out;
}

double max_abs(const Eigen::SparseMatrix<double>& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

FiniteChainSpec random_chain(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FiniteChainSpec spec{n, {}, 0.37, Boundary::open};
  for (int i = 0; i + 1 < n; ++i) spec.bonds.push_back({i, i + 1, u(rng), u(rng)});
  spec.bonds.push_back({0, n - 1, u(rng), u(rng)});
  spec.bonds.push_back({0, n - 2, u(rng), 0.0});
  return spec;
}

}  // namespace

TEST_CASE("spec builders and validation") {
  const auto open = FiniteChainSpec::xy_chain(8, 1.0, 0.0);
  CHECK(open.bonds.size() == 7);
  CHECK(open.middle_bond() == 3);
  CHECK(open.bonds[open.middle_bond()].site_i == 3);
  CHECK(FiniteChainSpec::xy_chain(8, 1.0, 0.0, Boundary::periodic).bonds.size() == 8);
  CHECK(FiniteChainSpec::xy_chain(2, 1.0, 0.0, Boundary::periodic).bonds.size() == 1);

  const auto alt = FiniteChainSpec::alternating_chain(6, 1.0, -1.0, 0.0);
  CHECK(alt.bonds[0].j_xy == 1.0);
  CHECK(alt.bonds[1].j_z == -1.0);

  CHECK_THROWS_AS(FiniteChainSpec::xy_chain(1, 1.0, 0.0).validate(), UsageError);
  CHECK_THROWS_AS(FiniteChainSpec::xy_chain(15, 1.0, 0.0).validate(), UsageError);
  FiniteChainSpec bad{4, {{0, 0, 1.0, 0.0}}, 0.0};
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad.bonds = {{0, 1, 1.0, 0.0}, {1, 0, 1.0, 0.0}};
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad.bonds = {{0, 4, 1.0, 0.0}};
  CHECK_THROWS_AS(bad.validate(), UsageError);
  CHECK_THROWS_AS(ChainSpectrum(FiniteChainSpec::xy_chain(13, 1.0, 0.0), Blocking::none),
                  UsageError);
}

TEST_CASE("Hamiltonian conserves total S^z") {
  std::mt19937_64 rng(1);
  for (int n : {4, 6, 9}) {
    const auto spec = random_chain(rng, n);
    const auto h = build_hamiltonian(spec);
    const auto sz = total_sz(n);
    const Eigen::SparseMatrix<double> commutator = h * sz - sz * h;
    CHECK(max_abs(commutator) < 1e-12);
    const Eigen::SparseMatrix<double> asym = h - Eigen::SparseMatrix<double>(h.transpose());
    CHECK(max_abs(asym) < 1e-15);
  }
}

TEST_CASE("two-site spectrum") {
  const double h = 0.3;
  const ChainSpectrum s(FiniteChainSpec::xy_chain(2, 1.0, h));
  std::vector<double> e(s.energies().begin(), s.energies().end());
  std::sort(e.begin(), e.end());
  CHECK(e[0] == doctest::Approx(-0.5));
  CHECK(e[1] == doctest::Approx(-h));
  CHECK(e[2] == doctest::Approx(h));
  CHECK(e[3] == doctest::Approx(0.5));
  CHECK(s.ground_energy() == doctest::Approx(-0.5));
}

TEST_CASE("blocked and dense diagonalization agree") {
  std::mt19937_64 rng(2);
  std::vector<FiniteChainSpec> specs = {
      FiniteChainSpec::alternating_chain(8, 1.0, -1.0, 0.45),
      FiniteChainSpec::heisenberg_chain(7, 1.0, -0.2, Boundary::periodic),
      random_chain(rng, 6),
  };
  for (const auto& spec : specs) {
    const ChainSpectrum blocked(spec, Blocking::sz_sectors);
    const ChainSpectrum dense(spec, Blocking::none);
    CHECK(std::abs(blocked.ground_energy() - dense.ground_energy()) < 1e-12);
    for (double t : {0.05, 0.4, 2.0}) {
      const auto a = blocked.thermal(t);
      const auto b = dense.thermal(t);
      CHECK(std::abs(a.u - b.u) < 1e-12);
      CHECK(std::abs(a.m - b.m) < 1e-12);
      CHECK(std::abs(a.partition_log - b.partition_log) < 1e-12);
      for (std::size_t k = 0; k < a.reduced.size(); ++k) {
        CHECK((a.reduced[k].matrix() - b.reduced[k].matrix()).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("open XY chain matches free fermions") {
  for (int n : {6, 10}) {
    for (double h : {0.0, 0.4, -1.1}) {
      const ChainSpectrum s(FiniteChainSpec::xy_chain(n, 1.0, h));
      for (double t : {0.1, 0.5, 1.5}) {
        const auto ed = s.thermal(t);
        const auto ff = free_fermion_oracle(n, 1.0, h, t);
        CHECK(std::abs(ed.u - ff.energy) < 1e-10);
        CHECK(std::abs(ed.m - (ff.g.trace() - n / 2.0)) < 1e-10);
        for (int i = 0; i + 1 < n; ++i) {
          const auto& b = ed.per_bond[i];
          const double g = ff.g(i, i + 1);
          CHECK(std::abs(b.z.real() - g) < 1e-10);
          CHECK(std::abs(b.z.imag()) < 1e-12);
          CHECK(std::abs(b.n_i() - ff.g(i, i)) < 1e-10);
          CHECK(std::abs(b.x_plus - (ff.g(i, i) * ff.g(i + 1, i + 1) - g * g)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("thermodynamic identities") {
  const auto spec = FiniteChainSpec::alternating_chain(8, 1.0, -0.6, 0.3);
  const ChainSpectrum s(spec);
  for (double t : {0.2, 0.8}) {
    const double dt = 1e-4 * t;
    // d log Z / dt = U / t^2
    const double dlogz =
        (s.thermal(t + dt).partition_log - s.thermal(t - dt).partition_log) / (2 * dt);
    CHECK(dlogz * t * t == doctest::Approx(s.thermal(t).u).epsilon(1e-6));

    // d log Z / dh = M / t
    const double dh = 1e-5;
    auto up = spec;
    auto down = spec;
    up.h += dh;
    down.h -= dh;
    const double dlogz_dh =
        (ChainSpectrum(up).thermal(t).partition_log - ChainSpectrum(down).thermal(t).partition_log) /
        (2 * dh);
    CHECK(dlogz_dh * t == doctest::Approx(s.thermal(t).m).epsilon(1e-6));
  }
}

TEST_CASE("symmetries of thermal states") {
  SUBCASE("field reversal") {
    const ChainSpectrum up(FiniteChainSpec::heisenberg_chain(6, 1.0, 0.7));
    const ChainSpectrum down(FiniteChainSpec::heisenberg_chain(6, 1.0, -0.7));
    const auto a = up.thermal(0.3);
    const auto b = down.thermal(0.3);
    CHECK(a.u == doctest::Approx(b.u).epsilon(1e-12));
    CHECK(a.m == doctest::Approx(-b.m).epsilon(1e-12));
    CHECK(bond_concurrence(a, 2).c == doctest::Approx(bond_concurrence(b, 2).c).epsilon(1e-10));
  }
  SUBCASE("periodic chain is translation invariant") {
    const auto r = thermal_expectations(FiniteChainSpec::xy_chain(8, 1.0, 0.2, Boundary::periodic),
                                        0.35);
    for (const auto& b : r.per_bond) {
      CHECK(std::abs(b.z.real() - r.per_bond[0].z.real()) < 1e-10);
      CHECK(std::abs(b.x_plus - r.per_bond[0].x_plus) < 1e-10);
    }
  }
  SUBCASE("Wootters equals the X-state form on U(1) symmetric states") {
    const auto r = thermal_expectations(FiniteChainSpec::alternating_chain(8, 1.0, -1.0, 0.9), 0.05);
    for (std::size_t k = 0; k < r.per_bond.size(); ++k) {
      CHECK(std::abs(bond_concurrence(r, k).c - xstate_concurrence(r.per_bond[k]).c) < 1e-10);
    }
  }
}

TEST_CASE("two-qubit critical temperature") {
  // c_tilde = 0 at sinh(J/2T) = 1
  const double expected = 1.0 / (2.0 * std::log(1.0 + std::sqrt(2.0)));
  for (double h : {0.0, 0.7, 1.9}) {
    const auto tc = critical_temperature_ed(FiniteChainSpec::xy_chain(2, 1.0, h), 0);
    REQUIRE(tc.has_value());
    CHECK(std::abs(*tc - expected) < 1e-9);
  }
  // a ferromagnetic Ising pair never entangles
  const FiniteChainSpec ising{2, {{0, 1, 0.0, -1.0}}, 0.0};
  CHECK(!critical_temperature_ed(ising, 0).has_value());
}

TEST_CASE("ferromagnetic bond is not entangled at zero field") {
  const auto spec = FiniteChainSpec::alternating_chain(8, 1.0, -1.0, 0.0);
  const auto r = thermal_expectations(spec, 0.05);
  CHECK(bond_concurrence(r, 4).c > 0.1);  // AF bond
  CHECK(bond_concurrence(r, 3).c == 0.0);  // F bond
}
