#include "thermalent/meanfield_aff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "thermalent/errors.hpp"

namespace thermalent::meanfield {

using std::numbers::pi;

namespace {

double fermi(double energy, double t) {
  const double arg = energy / t;
  if (arg > 0.0) {
    const double e = std::exp(-arg);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(arg));
}

// H_k = [[on_site_a, hop], [conj(hop), on_site_b]]
struct Bloch {
  double on_site_a;
  double on_site_b;
  Complex hop;
};

Bloch bloch(const MeanFieldState& s, const AlternatingParams& p, double k) {
  const double hartree = p.j_a + p.j_f;
  const Complex phase = std::polar(1.0, 0.5 * k);
  return {hartree * (s.d_b - 0.5) - p.h, hartree * (s.d_a - 0.5) - p.h,
          p.j_a * (0.5 - s.p_ab) * phase + p.j_f * (0.5 - std::conj(s.p_ba)) * std::conj(phase)};
}

std::vector<double> pack(const MeanFieldState& s) {
  return {s.d_a, s.d_b, s.p_ab.real(), s.p_ab.imag(), s.p_ba.real(), s.p_ba.imag()};
}

MeanFieldState unpack(std::span<const double> v) {
  MeanFieldState s;
  s.d_a = v[0];
  s.d_b = v[1];
  s.p_ab = {v[2], v[3]};
  s.p_ba = {v[4], v[5]};
  return s;
}

double max_change(const MeanFieldState& x, const MeanFieldState& y) {
  const auto a = pack(x);
  const auto b = pack(y);
  double change = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) change = std::max(change, std::abs(a[i] - b[i]));
  return change;
}

MeanFieldState solve_on_mesh(const AlternatingParams& params, const MeanFieldState& initial,
                             const SolveOptions& options) {
  numerics::FixedPointSpec spec = options.iteration;
  const auto map = [&](std::span<const double> v) {
    return pack(mean_field_map(unpack(v), params));
  };
  for (int attempt = 0;; ++attempt) {
    try {
      const auto result = numerics::fixed_point_solve(map, pack(initial), spec);
      MeanFieldState out = unpack(result.value);
      out.converged = true;
      out.residual = result.residual;
      out.iterations = result.iterations;
      out.n_k = params.n_k;
      return out;
    } catch (const ConvergenceError& e) {
      if (attempt >= options.max_restarts) {
        throw ConvergenceError(
            fmt::format("mean-field solve at t={}, h={} did not converge after {} restarts "
                        "(residual {})",
                        params.t, params.h, attempt, e.residual),
            e.previous, e.last, e.residual, e.state);
      }
      spec.mixing *= 0.5;
    }
  }
}

}  // namespace

void AlternatingParams::validate() const {
  if (!(j_a > 0.0 && j_f < 0.0))
    throw UsageError(fmt::format("need j_a > 0 > j_f, got j_a={}, j_f={}", j_a, j_f));
  if (!(t > 0.0)) throw UsageError(fmt::format("temperature must be positive, got {}", t));
  if (!std::isfinite(h)) throw UsageError("field must be finite");
  if (n_k < 256 || n_k % 2 != 0)
    throw UsageError(fmt::format("n_k must be even and >= 256, got {}", n_k));
}

Matrix2c hf_hamiltonian_k(const MeanFieldState& state, const AlternatingParams& params, double k) {
  const Bloch b = bloch(state, params, k);
  Matrix2c m;
  m << b.on_site_a, b.hop, std::conj(b.hop), b.on_site_b;
  return m;
}

std::pair<double, double> quasiparticle_bands(const MeanFieldState& state,
                                              const AlternatingParams& params, double k) {
  const Bloch b = bloch(state, params, k);
  const double mean = 0.5 * (b.on_site_a + b.on_site_b);
  const double half_gap = std::hypot(0.5 * (b.on_site_a - b.on_site_b), std::abs(b.hop));
  return {mean - half_gap, mean + half_gap};
}

MeanFieldState mean_field_map(const MeanFieldState& state, const AlternatingParams& params) {
  double d_a = 0.0;
  double d_b = 0.0;
  Complex p_ab{};
  Complex p_ba{};
  for (int i = 0; i < params.n_k; ++i) {
    const double k = -pi + 2.0 * pi * i / params.n_k;
    const Bloch b = bloch(state, params, k);
    // f(H_k) = A + B (H_k - mean), from the two band occupations
    const double mean = 0.5 * (b.on_site_a + b.on_site_b);
    const double delta = 0.5 * (b.on_site_a - b.on_site_b);
    const double half_gap = std::hypot(delta, std::abs(b.hop));
    const double f_lower = fermi(mean - half_gap, params.t);
    const double f_upper = fermi(mean + half_gap, params.t);
    const double avg = 0.5 * (f_lower + f_upper);
    const double slope = half_gap > 0.0 ? (f_upper - f_lower) / (2.0 * half_gap) : 0.0;

    const Complex back_phase = std::polar(1.0, -0.5 * k);
    d_a += avg + slope * delta;
    d_b += avg - slope * delta;
    // <psi+_mu psi_nu> = f(H)_{nu mu}; f(H)_ab = slope * hop
    p_ab += back_phase * slope * b.hop;
    p_ba += back_phase * slope * std::conj(b.hop);
  }
  const double norm = 1.0 / params.n_k;
  MeanFieldState next = state;
  next.d_a = d_a * norm;
  next.d_b = d_b * norm;
  next.p_ab = p_ab * norm;
  next.p_ba = p_ba * norm;
  return next;
}

MeanFieldState self_consistent_solve(const AlternatingParams& params, const MeanFieldState& initial,
                                     const SolveOptions& options) {
  params.validate();
  MeanFieldState state = solve_on_mesh(params, initial, options);
  if (!options.refine_mesh) return state;
  AlternatingParams finer = params;
  while (2 * finer.n_k <= options.max_n_k) {
    finer.n_k *= 2;
    const MeanFieldState refined = solve_on_mesh(finer, state, options);
    const double change = max_change(state, refined);
    state = refined;
    if (change < options.mesh_tol) break;
  }
  return state;
}

BondObservables af_bond(const MeanFieldState& s) {
  const Complex z = std::conj(s.p_ab);
  return BondObservables::from_densities(s.d_a, s.d_b, z, s.d_a * s.d_b - std::norm(z));
}

BondObservables f_bond(const MeanFieldState& s) {
  // translation invariance: the next cell's a-site density is d_a
  const Complex z = std::conj(s.p_ba);
  return BondObservables::from_densities(s.d_b, s.d_a, z, s.d_b * s.d_a - std::norm(z));
}

MFResult mf_concurrences(const MeanFieldState& state, const AlternatingParams& params) {
  if (!state.converged) throw InvalidStateError("mean-field state is not converged");
  const BondObservables a = af_bond(state);
  const BondObservables f = f_bond(state);
  a.validate();
  f.validate();
  MFResult out{state, xstate_concurrence(a), xstate_concurrence(f), {}, {}};
  out.band_minus = [state, params](double k) { return quasiparticle_bands(state, params, k).first; };
  out.band_plus = [state, params](double k) { return quasiparticle_bands(state, params, k).second; };
  return out;
}

CriticalIdentities critical_identities(const MeanFieldState& s, BondKind bond) {
  const double p2 = std::norm(bond == BondKind::a ? s.p_ab : s.p_ba);
  const double q = -std::sqrt(p2);
  CriticalIdentities out;
  out.reduced_form = s.d_a - s.d_a * s.d_a + std::numbers::sqrt2 * q + q * q;
  const double first = p2 - s.d_a * (s.d_b - 1.0);
  const double second = p2 - s.d_b * (s.d_a - 1.0);
  out.product_form_symmetric = first * second - 2.0 * p2;
  out.product_form_repeated = first * first - 2.0 * p2;
  return out;
}

std::optional<CriticalPoint> mf_critical_temperature(const AlternatingParams& params,
                                                     BondKind bond, const TemperatureScan& scan,
                                                     const SolveOptions& options) {
  if (scan.points < 2 || !(scan.t_min > 0.0) || !(scan.t_max > scan.t_min))
    throw UsageError("temperature scan needs t_max > t_min > 0 and at least two points");

  const auto c_tilde_of = [&](const MeanFieldState& s) {
    return xstate_concurrence(bond == BondKind::a ? af_bond(s) : f_bond(s)).c_tilde;
  };
  const auto solve_at = [&](double t, const MeanFieldState& warm) {
    AlternatingParams at = params;
    at.t = t;
    return self_consistent_solve(at, warm, options);
  };

  std::vector<double> ts(scan.points);
  std::vector<double> cs(scan.points);
  std::vector<MeanFieldState> states;
  states.reserve(scan.points);
  MeanFieldState warm = MeanFieldState::seed();
  for (int k = 0; k < scan.points; ++k) {
    ts[k] = params.j_a * (scan.t_min + (scan.t_max - scan.t_min) * k / (scan.points - 1));
    warm = solve_at(ts[k], warm);
    states.push_back(warm);
    cs[k] = c_tilde_of(warm);
  }
  if (cs.back() > 0.0) {
    throw BracketError(fmt::format("bond still entangled at the top of the scan, t = {}",
                                   ts.back()),
                       ts.front(), ts.back(), cs.front(), cs.back());
  }
  for (int k = scan.points - 1; k > 0; --k) {
    if (!(cs[k - 1] > 0.0 && cs[k] <= 0.0)) continue;
    const MeanFieldState& below = states[k - 1];
    const double t_c = numerics::find_root_bracketed(
        [&](double t) { return c_tilde_of(solve_at(t, below)); },
        {.lo = ts[k - 1], .hi = ts[k], .abs_tol = scan.abs_tol * params.j_a});
    CriticalPoint point{t_c, solve_at(t_c, below), {}};
    point.identities = critical_identities(point.state, bond);
    return point;
  }
  return std::nullopt;
}

}  // namespace thermalent::meanfield
