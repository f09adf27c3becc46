#include <doctest.h>

#include <cmath>
#include <random>

#include "thermalent/errors.hpp"
#include "thermalent/witness.hpp"
#include "thermalent/xy_exact.hpp"

using namespace thermalent;
using namespace thermalent::witness;

namespace {

// Extensive energy and magnetization of an N-site chain with the given
// per-site XY observables.
MacroObservables from_xy(const xy::XYPointResult& r, int n_sites, double j, double h,
                         EnergyReference ref) {
  double u = n_sites * (j * r.z - h * (r.n - 0.5));
  if (ref == EnergyReference::fermion_hamiltonian) u -= n_sites * h / 2;
  return {u, n_sites * (r.n - 0.5), n_sites, j, h, ref};
}

}  // namespace

TEST_CASE("witness reproduces the indicator built from exact observables") {
  for (double j : {1.0, 1.7}) {
    for (double h : {0.0, 0.25, 0.8, -0.6}) {
      for (double t : {0.1, 0.45, 0.9, 1.8}) {
        const auto r = xy::evaluate_point({j, h, t, false});
        for (auto ref : {EnergyReference::spin_hamiltonian, EnergyReference::fermion_hamiltonian}) {
          const auto obs = from_xy(r, 64, j, h, ref);
          CHECK(std::abs(obs.hopping() - r.z) < 1e-12);
          CHECK(std::abs(thermal_witness(obs) - r.phi) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("the two energy references differ by the constant N h / 2") {
  const MacroObservables spin{-3.0, 1.5, 10, 1.0, 0.4, EnergyReference::spin_hamiltonian};
  MacroObservables fermion = spin;
  fermion.energy_reference = EnergyReference::fermion_hamiltonian;
  CHECK(fermion.hopping() - spin.hopping() == doctest::Approx(0.4 / 2));
  fermion.h = 0.0;
  MacroObservables spin0 = spin;
  spin0.h = 0.0;
  CHECK(fermion.hopping() == spin0.hopping());
}

TEST_CASE("zero-field criterion is the h = 0 slice of the witness") {
  CHECK(kZeroFieldThreshold == doctest::Approx((std::sqrt(2.0) - 1) / 2).epsilon(1e-16));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> energy(-0.5, 0.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double u_per_site = energy(rng);
    const MacroObservables obs{u_per_site * 20, 0.0, 20, 1.0, 0.0,
                               EnergyReference::spin_hamiltonian};
    CHECK((thermal_witness(obs) < 0.0) == zero_field_energy_criterion(obs.u, 20, 1.0));
  }
}

TEST_CASE("the new criterion accepts everything the quarter criterion does") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> energy(-0.6, 0.0);
  int strictly_new = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const double u = energy(rng) * 30;
    if (quarter_energy_criterion(u, 30, 1.0)) CHECK(zero_field_energy_criterion(u, 30, 1.0));
    if (zero_field_energy_criterion(u, 30, 1.0) && !quarter_energy_criterion(u, 30, 1.0))
      ++strictly_new;
  }
  CHECK(strictly_new > 0);
}

TEST_CASE("witness input validation") {
  CHECK_THROWS_AS(thermal_witness({0.0, 0.0, 1, 1.0, 0.0}), UsageError);
  CHECK_THROWS_AS(thermal_witness({0.0, 0.0, 4, 0.0, 0.0}), UsageError);
  CHECK_THROWS_AS(thermal_witness({0.0, 2.5, 4, 1.0, 0.0}), UsageError);
  CHECK_NOTHROW(thermal_witness({0.0, 2.0, 4, 1.0, 0.0}));
}
