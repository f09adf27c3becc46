#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "thermalent/errors.hpp"
#include "thermalent/meanfield_aff.hpp"

using namespace thermalent;
using namespace thermalent::meanfield;
using std::numbers::pi;

namespace {

// Reference for one map step: diagonalize every Bloch matrix and build f(H)
// from its eigenvectors.
MeanFieldState reference_map(const MeanFieldState& s, const AlternatingParams& p) {
  MeanFieldState out = s;
  out.d_a = out.d_b = 0.0;
  out.p_ab = out.p_ba = 0.0;
  for (int i = 0; i < p.n_k; ++i) {
    const double k = -pi + 2.0 * pi * i / p.n_k;
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(hf_hamiltonian_k(s, p, k));
    Eigen::Vector2d occ;
    for (int b = 0; b < 2; ++b) occ[b] = 1.0 / (std::exp(es.eigenvalues()[b] / p.t) + 1.0);
    const Matrix2c f = es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().adjoint();
    const Complex phase = std::polar(1.0, -0.5 * k);
    out.d_a += f(0, 0).real();
    out.d_b += f(1, 1).real();
    out.p_ab += phase * f(0, 1);
    out.p_ba += phase * f(1, 0);
  }
  out.d_a /= p.n_k;
  out.d_b /= p.n_k;
  out.p_ab /= double(p.n_k);
  out.p_ba /= double(p.n_k);
  return out;
}

}  // namespace

TEST_CASE("mean-field map matches direct diagonalization") {
  MeanFieldState s = MeanFieldState::seed();
  s.d_a = 0.62;
  s.d_b = 0.55;
  s.p_ab = {-0.31, 0.04};
  s.p_ba = {0.12, -0.02};
  for (double h : {0.0, 0.4}) {
    for (double t : {0.05, 0.3, 2.0}) {
      const AlternatingParams p{1.0, -0.7, h, t, 512};
      const auto a = mean_field_map(s, p);
      const auto b = reference_map(s, p);
      CHECK(std::abs(a.d_a - b.d_a) < 1e-13);
      CHECK(std::abs(a.d_b - b.d_b) < 1e-13);
      CHECK(std::abs(a.p_ab - b.p_ab) < 1e-13);
      CHECK(std::abs(a.p_ba - b.p_ba) < 1e-13);
    }
  }
}

TEST_CASE("Bloch Hamiltonian and bands") {
  const MeanFieldState s = MeanFieldState::seed();
  const AlternatingParams p{1.0, -1.0, 0.3, 0.2, 256};
  for (double k : {-3.0, -1.0, 0.0, 0.5, 2.9}) {
    const Matrix2c h = hf_hamiltonian_k(s, p, k);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Matrix2c>(h).eigenvalues();
    const auto [lo, hi] = quasiparticle_bands(s, p, k);
    CHECK(lo == doctest::Approx(ev[0]).epsilon(1e-13));
    CHECK(hi == doctest::Approx(ev[1]).epsilon(1e-13));
  }
}

TEST_CASE("self-consistent solution at zero field") {
  const AlternatingParams p{1.0, -1.0, 0.0, 0.1, 2048};
  const auto s = self_consistent_solve(p);
  REQUIRE(s.converged);
  // frozen from an independent numpy implementation
  CHECK(s.d_a == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.d_b == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.p_ab.real() == doctest::Approx(-0.4783).epsilon(2e-4));
  CHECK(s.p_ba.real() == doctest::Approx(0.1038).epsilon(1e-3));
  CHECK(std::abs(s.p_ab.imag()) < 1e-8);
  const auto r = mf_concurrences(s, p);
  CHECK(r.c_a.c_tilde == doctest::Approx(0.9143).epsilon(2e-4));
  CHECK(r.c_f.c == 0.0);
  CHECK(r.c_f.c_tilde == doctest::Approx(-0.2708).epsilon(1e-3));
  CHECK(r.band_minus(0.3) <= r.band_plus(0.3));

  SUBCASE("the converged state is a fixed point of the map") {
    AlternatingParams fine = p;
    fine.n_k = s.n_k;
    const auto next = mean_field_map(s, fine);
    CHECK(std::abs(next.p_ab - s.p_ab) < 1e-9);
    CHECK(std::abs(next.d_a - s.d_a) < 1e-9);
  }
}

TEST_CASE("limits") {
  SUBCASE("high temperature") {
    const auto s = self_consistent_solve({1.0, -1.0, 0.0, 1e6, 2048});
    CHECK(std::abs(s.p_ab) < 1e-6);
    CHECK(std::abs(s.p_ba) < 1e-6);
    CHECK(s.d_a == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("strong field saturates the chain") {
    const AlternatingParams p{1.0, -1.0, 3.0, 0.05, 2048};
    const auto s = self_consistent_solve(p);
    CHECK(s.d_a > 1 - 1e-8);
    CHECK(s.d_b > 1 - 1e-8);
    const auto r = mf_concurrences(s, p);
    CHECK(r.c_a.c < 1e-9);
    CHECK(r.c_f.c < 1e-9);
  }
  SUBCASE("field reversal maps d to 1-d") {
    const auto up = self_consistent_solve({1.0, -1.0, 0.5, 0.2, 2048});
    const auto down = self_consistent_solve({1.0, -1.0, -0.5, 0.2, 2048});
    CHECK(std::abs(up.d_a + down.d_a - 1) < 1e-8);
    CHECK(std::abs(std::abs(up.p_ab) - std::abs(down.p_ab)) < 1e-8);
    CHECK(std::abs(std::abs(up.p_ba) - std::abs(down.p_ba)) < 1e-8);
  }
}

TEST_CASE("uniform sublattices at convergence") {
  for (double h : {0.3, 0.9}) {
    for (double t : {0.05, 0.4}) {
      const auto s = self_consistent_solve({1.0, -1.0, h, t, 2048});
      CHECK(std::abs(s.p_ab.imag()) < 1e-8);
      CHECK(std::abs(s.p_ba.imag()) < 1e-8);
      CHECK(std::abs(s.d_a - s.d_b) < 1e-8);
    }
  }
}

TEST_CASE("field-induced entanglement of the ferromagnetic bond") {
  const AlternatingParams p{1.0, -1.0, 0.9, 0.02, 2048};
  const auto r = mf_concurrences(self_consistent_solve(p), p);
  CHECK(r.c_f.c > 0.0);
  CHECK(r.c_a.c > 0.0);
}

TEST_CASE("critical temperature of the AF bond at zero field") {
  const auto cp = mf_critical_temperature({1.0, -1.0, 0.0, 0.1, 2048}, BondKind::a);
  REQUIRE(cp.has_value());
  CHECK(cp->t_c == doctest::Approx(0.77041).epsilon(2e-5));
  CHECK(std::abs(cp->identities.reduced_form) < 1e-6);
  CHECK(std::abs(cp->identities.product_form_symmetric) < 1e-6);
  CHECK(!mf_critical_temperature({1.0, -1.0, 0.0, 0.1, 2048}, BondKind::f).has_value());
}

TEST_CASE("failure modes") {
  CHECK_THROWS_AS(self_consistent_solve({1.0, 1.0, 0.0, 0.1, 2048}), UsageError);
  CHECK_THROWS_AS(self_consistent_solve({1.0, -1.0, 0.0, 0.0, 2048}), UsageError);
  CHECK_THROWS_AS(self_consistent_solve({1.0, -1.0, 0.0, 0.1, 255}), UsageError);

  SolveOptions tight;
  tight.iteration.max_iter = 2;
  tight.max_restarts = 0;
  try {
    self_consistent_solve({1.0, -1.0, 0.0, 0.1, 2048}, MeanFieldState::seed(), tight);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.state.size() == 6);
    CHECK(e.residual > 0.0);
  }
  CHECK_THROWS_AS(mf_concurrences(MeanFieldState::seed(), {}), InvalidStateError);
}
