#include "thermalent/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "thermalent/ed_oracle.hpp"
#include "thermalent/errors.hpp"
#include "thermalent/meanfield_aff.hpp"
#include "thermalent/witness.hpp"
#include "thermalent/xy_exact.hpp"

namespace thermalent::cli {

std::size_t worker_count() {
  if (const char* env = std::getenv("THERMALENT_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  }
  if (failure) std::rethrow_exception(failure);
}

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

namespace {

// Temperature grid: an explicit list, or t_min..t_max in steps of t_step.
struct TemperatureGrid {
  std::vector<double> list;
  double t_min = 0.1;
  double t_max = 2.0;
  double t_step = 0.1;

  void add_options(CLI::App& app) {
    app.add_option("--t", list, "Explicit temperatures (non-decreasing)");
    app.add_option("--t-min", t_min, "Lowest temperature of the grid")->capture_default_str();
    app.add_option("--t-max", t_max, "Highest temperature of the grid")->capture_default_str();
    app.add_option("--t-step", t_step, "Grid spacing")->capture_default_str();
  }

  std::vector<double> resolve(std::ostream& err) const {
    std::vector<double> ts;
    if (!list.empty()) {
      for (std::size_t i = 1; i < list.size(); ++i) {
        if (list[i] < list[i - 1]) throw UsageError("temperature list must be increasing");
      }
      ts = list;
    } else {
      if (!(t_step > 0.0) || !(t_max >= t_min))
        throw UsageError("temperature grid needs t_step > 0 and t_max >= t_min");
      const auto steps = static_cast<long>(std::floor((t_max - t_min) / t_step + 1e-9));
      for (long k = 0; k <= steps; ++k) ts.push_back(t_min + k * t_step);
    }
    const std::size_t before = ts.size();
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.size() != before)
      err << fmt::format("warning: dropped {} duplicate temperatures\n", before - ts.size());
    for (double t : ts) {
      if (!(t > 0.0) || !std::isfinite(t))
        throw UsageError(fmt::format("temperatures must be positive, got {}", t));
    }
    return ts;
  }
};

std::vector<double> resolve_fields(std::vector<double> hs, std::ostream& err) {
  if (hs.empty()) throw UsageError("at least one field value (--h) is required");
  for (double h : hs) {
    if (!std::isfinite(h)) throw UsageError("field values must be finite");
  }
  std::sort(hs.begin(), hs.end());
  const std::size_t before = hs.size();
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  if (hs.size() != before)
    err << fmt::format("warning: dropped {} duplicate field values\n", before - hs.size());
  return hs;
}

// Writes to --output when set, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError(fmt::format("cannot open output file '{}'", path));
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string join_row(std::initializer_list<std::string> cells) {
  std::string row;
  for (const auto& c : cells) {
    if (!row.empty()) row += ',';
    row += c;
  }
  row += '\n';
  return row;
}

// ---------------------------------------------------------------- xy-sweep

struct XYSweepConfig {
  double j = 1.0;
  std::vector<double> h;
  TemperatureGrid grid;
  numerics::QuadratureSpec quad;
  std::string output;
};

int xy_sweep(const XYSweepConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.j > 0.0)) throw UsageError("--j must be positive");
  cfg.quad.validate();
  const auto hs = resolve_fields(cfg.h, err);
  const auto ts = cfg.grid.resolve(err);

  const std::size_t rows = hs.size() * ts.size();
  std::vector<std::optional<std::string>> lines(rows);
  std::vector<std::string> failures(rows);
  parallel_for(rows, worker_count(), [&](std::size_t i) {
    const double h = hs[i / ts.size()];
    const double t = ts[i % ts.size()];
    try {
      const auto r = xy::evaluate_point({cfg.j, h, t, false}, {.quadrature = cfg.quad});
      lines[i] = join_row({format_number(t), format_number(h), format_number(r.concurrence.c),
                           format_number(r.concurrence.c_tilde), format_number(r.z),
                           format_number(r.n), format_number(r.x_plus), format_number(r.x_minus),
                           format_number(r.phi)});
    } catch (const NumericalError& e) {
      failures[i] = fmt::format("error: T={}, h={}: {}\n", t, h, e.what());
    }
  });

  Sink sink(cfg.output, out);
  *sink << "T,h,C,Ctilde,Z,n,Xplus,Xminus,Phi\n";
  bool failed = false;
  for (std::size_t i = 0; i < rows; ++i) {
    if (lines[i]) {
      *sink << *lines[i];
    } else {
      err << failures[i];
      failed = true;
    }
  }
  return failed ? kNumericalFailure : kSuccess;
}

// ------------------------------------------------------------------- xy-tc

struct XYTcConfig {
  double j = 1.0;
  std::vector<double> h;
  double independence_tol = 1e-6;
  numerics::QuadratureSpec quad;
  std::string output;
};

int xy_tc(const XYTcConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.j > 0.0)) throw UsageError("--j must be positive");
  if (!(cfg.independence_tol > 0.0)) throw UsageError("--independence-tol must be positive");
  cfg.quad.validate();
  const auto hs = resolve_fields(cfg.h, err);

  std::vector<std::optional<double>> tcs(hs.size());
  std::vector<std::string> notes(hs.size());
  parallel_for(hs.size(), worker_count(), [&](std::size_t i) {
    try {
      tcs[i] = xy::critical_temperature(hs[i], cfg.j, cfg.quad);
    } catch (const BracketError& e) {
      notes[i] = e.what();
    }
  });

  Sink sink(cfg.output, out);
  *sink << "h,Tc\n";
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (tcs[i]) {
      *sink << join_row({format_number(hs[i]), format_number(*tcs[i])});
      lo = std::min(lo, *tcs[i]);
      hi = std::max(hi, *tcs[i]);
    } else {
      *sink << join_row({format_number(hs[i]), "absent"});
      err << fmt::format("note: h={}: no critical temperature ({})\n", hs[i], notes[i]);
    }
  }
  if (!(hi >= lo)) {
    *sink << "# max spread: absent\n";
    return kSuccess;
  }
  const double spread = hi - lo;
  *sink << fmt::format("# max spread: {} (tolerance {})\n", format_number(spread),
                       format_number(cfg.independence_tol));
  if (spread > cfg.independence_tol) {
    err << fmt::format("error: T_c spread {:.3e} exceeds the independence tolerance {:.3e}\n",
                       spread, cfg.independence_tol);
    return kInvariantViolation;
  }
  return kSuccess;
}

// ----------------------------------------------------------------- witness

struct WitnessConfig {
  witness::MacroObservables obs;
  std::string output;
};

int witness_cmd(const WitnessConfig& cfg, std::ostream& out) {
  const double phi = witness::thermal_witness(cfg.obs);
  Sink sink(cfg.output, out);
  *sink << fmt::format("Phi = {}\n", format_number(phi));
  *sink << fmt::format("verdict: {}\n", phi < 0.0 ? "entangled" : "not witnessed");
  if (cfg.obs.h == 0.0) {
    const bool ok = witness::zero_field_energy_criterion(cfg.obs.u, cfg.obs.n_sites, cfg.obs.j);
    *sink << fmt::format("zero-field energy criterion |U|/NJ > (sqrt(2)-1)/2: {}\n",
                         ok ? "entangled" : "not witnessed");
  }
  return kSuccess;
}

// ---------------------------------------------------------------------- ed

struct EDConfig {
  int n_sites = 8;
  std::string model = "xy";
  double j = 1.0;
  double j_a = 1.0;
  double j_f = -1.0;
  double h = 0.0;
  std::string boundary = "open";
  std::vector<std::string> bonds;
  bool no_blocking = false;
  TemperatureGrid grid;
  std::string output;
};

ed::Bond parse_bond(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
  if (parts.size() != 4) throw UsageError(fmt::format("bond '{}' is not i,j,j_xy,j_z", text));
  try {
    return {std::stoi(parts[0]), std::stoi(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
  } catch (const std::exception&) {
    throw UsageError(fmt::format("cannot parse bond '{}'", text));
  }
}

ed::FiniteChainSpec chain_from(const EDConfig& cfg) {
  const auto boundary = cfg.boundary == "periodic" ? ed::Boundary::periodic : ed::Boundary::open;
  if (cfg.n_sites < ed::kMinSites || cfg.n_sites > ed::kMaxSites) {
    throw UsageError(fmt::format("--n-sites must lie in [{}, {}]", ed::kMinSites, ed::kMaxSites));
  }
  if (cfg.model == "xy") return ed::FiniteChainSpec::xy_chain(cfg.n_sites, cfg.j, cfg.h, boundary);
  if (cfg.model == "heisenberg")
    return ed::FiniteChainSpec::heisenberg_chain(cfg.n_sites, cfg.j, cfg.h, boundary);
  if (cfg.model == "aff")
    return ed::FiniteChainSpec::alternating_chain(cfg.n_sites, cfg.j_a, cfg.j_f, cfg.h, boundary);
  // custom
  ed::FiniteChainSpec spec{cfg.n_sites, {}, cfg.h, boundary};
  for (const auto& b : cfg.bonds) spec.bonds.push_back(parse_bond(b));
  if (spec.bonds.empty()) throw UsageError("custom model needs at least one --bond");
  spec.validate();
  return spec;
}

int ed_cmd(const EDConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto spec = chain_from(cfg);
  const auto ts = cfg.grid.resolve(err);
  const ed::ChainSpectrum spectrum(spec,
                                   cfg.no_blocking ? ed::Blocking::none : ed::Blocking::sz_sectors);

  std::vector<std::string> blocks(ts.size());
  parallel_for(ts.size(), worker_count(), [&](std::size_t i) {
    const auto r = spectrum.thermal(ts[i]);
    std::string block;
    for (std::size_t b = 0; b < r.per_bond.size(); ++b) {
      const auto c = ed::bond_concurrence(r, b);
      block += join_row({format_number(r.t), format_number(r.u), format_number(r.m),
                         std::to_string(b), format_number(c.c), format_number(c.c_tilde),
                         format_number(r.per_bond[b].z.real()),
                         format_number(r.per_bond[b].n_i())});
    }
    blocks[i] = std::move(block);
  });

  Sink sink(cfg.output, out);
  *sink << "T,U,M,bond,C,Ctilde,Z,n\n";
  for (const auto& block : blocks) *sink << block;
  return kSuccess;
}

// ------------------------------------------------------------------ mf-aff

struct MFConfig {
  double j_a = 1.0;
  double j_f = -1.0;
  std::vector<double> h;
  TemperatureGrid grid;
  int n_k = 2048;
  double mixing = 0.5;
  std::string output;
};

int mf_cmd(const MFConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto hs = resolve_fields(cfg.h, err);
  const auto ts = cfg.grid.resolve(err);
  meanfield::SolveOptions options;
  options.iteration.mixing = cfg.mixing;
  options.iteration.validate();
  meanfield::AlternatingParams probe{cfg.j_a, cfg.j_f, hs.front(), ts.front(), cfg.n_k};
  probe.validate();

  std::vector<std::string> blocks(hs.size());
  std::vector<std::string> diagnostics(hs.size());
  parallel_for(hs.size(), worker_count(), [&](std::size_t i) {
    meanfield::MeanFieldState warm = meanfield::MeanFieldState::seed();
    std::string block;
    for (double t : ts) {
      const meanfield::AlternatingParams params{cfg.j_a, cfg.j_f, hs[i], t, cfg.n_k};
      meanfield::MeanFieldState state;
      try {
        state = meanfield::self_consistent_solve(params, warm, options);
        warm = state;
      } catch (const ConvergenceError& e) {
        state = warm;
        if (e.state.size() == 6) {
          state.d_a = e.state[0];
          state.d_b = e.state[1];
          state.p_ab = {e.state[2], e.state[3]};
          state.p_ba = {e.state[4], e.state[5]};
        }
        state.converged = false;
        warm = meanfield::MeanFieldState::seed();
        diagnostics[i] += fmt::format("warning: T={}, h={}: {}\n", t, hs[i], e.what());
      }
      double ca = NAN;
      double cf = NAN;
      try {
        ca = xstate_concurrence(meanfield::af_bond(state)).c;
        cf = xstate_concurrence(meanfield::f_bond(state)).c;
      } catch (const InvalidStateError& e) {
        diagnostics[i] += fmt::format("warning: T={}, h={}: {}\n", t, hs[i], e.what());
      }
      block += join_row({format_number(t), format_number(hs[i]), format_number(state.d_a),
                         format_number(state.d_b), format_number(state.p_ab.real()),
                         format_number(state.p_ab.imag()), format_number(state.p_ba.real()),
                         format_number(state.p_ba.imag()), format_number(ca), format_number(cf),
                         state.converged ? "1" : "0"});
    }
    blocks[i] = std::move(block);
  });

  Sink sink(cfg.output, out);
  *sink << "T,h,da,db,pab_re,pab_im,pba_re,pba_im,Ca,Cf,converged\n";
  for (std::size_t i = 0; i < hs.size(); ++i) {
    *sink << blocks[i];
    err << diagnostics[i];
  }
  return kSuccess;
}

void add_quadrature_options(CLI::App& app, numerics::QuadratureSpec& quad) {
  app.add_option("--order", quad.order, "Initial Gauss-Chebyshev node count")
      ->capture_default_str();
  app.add_option("--max-order", quad.max_order, "Node count limit")->capture_default_str();
  app.add_option("--rel-tol", quad.rel_tol, "Relative quadrature tolerance")
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermal pairwise entanglement of S=1/2 spin chains", "thermalent"};
  // -h would collide with the field option --h
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "TOML config file; command-line flags override it");
  app.require_subcommand(1);

  XYSweepConfig sweep;
  auto* sweep_cmd = app.add_subcommand("xy-sweep", "Infinite XY chain on a (T, h) grid, CSV");
  sweep_cmd->add_option("--j", sweep.j, "Coupling J > 0")->capture_default_str();
  sweep_cmd->add_option("--h", sweep.h, "Field values")->required();
  sweep.grid.add_options(*sweep_cmd);
  add_quadrature_options(*sweep_cmd, sweep.quad);
  sweep_cmd->add_option("--output", sweep.output, "CSV file (default stdout)");

  XYTcConfig tc;
  auto* tc_cmd = app.add_subcommand("xy-tc", "Critical temperature of the infinite XY chain");
  tc_cmd->add_option("--j", tc.j, "Coupling J > 0")->capture_default_str();
  tc_cmd->add_option("--h", tc.h, "Field values")->required();
  tc_cmd->add_option("--independence-tol", tc.independence_tol,
                     "Largest accepted T_c spread across fields")
      ->capture_default_str();
  add_quadrature_options(*tc_cmd, tc.quad);
  tc_cmd->add_option("--output", tc.output, "Report file (default stdout)");

  WitnessConfig wit;
  std::string energy_reference = "spin";
  auto* wit_cmd = app.add_subcommand("witness", "Thermodynamic entanglement witness Phi(U, M, h)");
  wit_cmd->add_option("--u", wit.obs.u, "Internal energy U (extensive)")->required();
  wit_cmd->add_option("--m", wit.obs.m, "Total magnetization M")->required();
  wit_cmd->add_option("--n-sites", wit.obs.n_sites, "Number of sites N")->required();
  wit_cmd->add_option("--j", wit.obs.j, "Coupling J > 0")->capture_default_str();
  wit_cmd->add_option("--h", wit.obs.h, "Field h")->capture_default_str();
  wit_cmd
      ->add_option("--energy-reference", energy_reference,
                   "spin: U = <H> of the spin Hamiltonian; fermion: U omits the -N h/2 constant")
      ->check(CLI::IsMember({"spin", "fermion"}))
      ->capture_default_str();
  wit_cmd->add_option("--output", wit.output, "Report file (default stdout)");

  EDConfig edc;
  auto* ed_cmd_app = app.add_subcommand("ed", "Exact diagonalization of a finite chain, CSV");
  ed_cmd_app->add_option("--n-sites", edc.n_sites, "Chain length, 2..14")->capture_default_str();
  ed_cmd_app->add_option("--model", edc.model, "xy | heisenberg | aff | custom")
      ->check(CLI::IsMember({"xy", "heisenberg", "aff", "custom"}))
      ->capture_default_str();
  ed_cmd_app->add_option("--j", edc.j, "Uniform coupling (xy, heisenberg)")->capture_default_str();
  ed_cmd_app->add_option("--j-a", edc.j_a, "AF coupling (aff)")->capture_default_str();
  ed_cmd_app->add_option("--j-f", edc.j_f, "F coupling (aff)")->capture_default_str();
  ed_cmd_app->add_option("--h", edc.h, "Field")->capture_default_str();
  ed_cmd_app->add_option("--boundary", edc.boundary, "open | periodic")
      ->check(CLI::IsMember({"open", "periodic"}))
      ->capture_default_str();
  ed_cmd_app->add_option("--bond", edc.bonds, "Custom bond i,j,j_xy,j_z (repeatable)");
  ed_cmd_app->add_flag("--no-blocking", edc.no_blocking, "Diagonalize without S^z sectors");
  edc.grid.add_options(*ed_cmd_app);
  ed_cmd_app->add_option("--output", edc.output, "CSV file (default stdout)");

  MFConfig mfc;
  auto* mf_app = app.add_subcommand("mf-aff", "Hartree-Fock AF-F alternating chain, CSV");
  mf_app->add_option("--j-a", mfc.j_a, "AF coupling > 0")->capture_default_str();
  mf_app->add_option("--j-f", mfc.j_f, "F coupling < 0")->capture_default_str();
  mf_app->add_option("--h", mfc.h, "Field values")->required();
  mfc.grid.add_options(*mf_app);
  mf_app->add_option("--n-k", mfc.n_k, "Brillouin-zone mesh")->capture_default_str();
  mf_app->add_option("--mixing", mfc.mixing, "Fixed-point mixing in (0,1]")
      ->capture_default_str();
  mf_app->add_option("--output", mfc.output, "CSV file (default stdout)");

  std::vector<std::string> reversed;
  if (!args.empty()) reversed.assign(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return kSuccess;
    }
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*sweep_cmd) return xy_sweep(sweep, out, err);
    if (*tc_cmd) return xy_tc(tc, out, err);
    if (*wit_cmd) {
      wit.obs.energy_reference = energy_reference == "fermion"
                                     ? witness::EnergyReference::fermion_hamiltonian
                                     : witness::EnergyReference::spin_hamiltonian;
      return witness_cmd(wit, out);
    }
    if (*ed_cmd_app) return ed_cmd(edc, out, err);
    if (*mf_app) return mf_cmd(mfc, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const InvalidStateError& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  }
  return kUsageError;
}

}  // namespace thermalent::cli
