#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "anisoflow/config.hpp"
#include "anisoflow/diagnostics.hpp"
#include "anisoflow/field_io.hpp"
#include "anisoflow/hypothesis.hpp"
#include "anisoflow/multiplier.hpp"
#include "anisoflow/random.hpp"
#include "anisoflow/solver.hpp"
#include "anisoflow/transport.hpp"
#include "report.hpp"

namespace anisoflow::app {

enum ExitCode : int { ok = 0, config_error = 1, not_converged = 2, hypothesis_failed = 3 };

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::string mode = "solve";
  bool strict = false;
  bool dump_fields = false;
  std::uint64_t seed = 0;
};

inline bool valid_mode(const std::string& m) {
  return m == "check-hypotheses" || m == "solve" || m == "continuation" || m == "diagnose";
}

namespace detail {

using report::Json;

inline bool is_trivial(const solver::SolverState& s, const PhysParams& p) {
  double umax = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (double v : s.u[c].nodal()) umax = std::max(umax, std::abs(v));
  }
  double rdev = 0.0;
  for (double v : s.rho.nodal()) rdev = std::max(rdev, std::abs(v - p.M));
  return umax == 0.0 && rdev <= 1e-12;
}

inline diagnostics::DiagnosticsOptions diagnostics_options(const config::RunConfig& c) {
  diagnostics::DiagnosticsOptions o;
  o.C = c.C;
  o.c0 = c.c0;
  o.alpha = c.alpha;
  o.commutator_deltas = c.commutator_deltas;
  o.guard = c.solver.guard();
  return o;
}

/// Full diagnostics, or the error message if the state does not admit them
/// (for example a negative density with a fractional exponent).
inline Json diagnostics_json(const solver::SolverState& s, const config::RunConfig& c,
                             const VectorField& g) {
  try {
    return report::to_json(diagnostics::diagnose(s, c.phys, c.kernels, g, diagnostics_options(c)));
  } catch (const std::exception& e) {
    return Json{{"error", e.what()}};
  }
}

inline Json brief_json(const solver::SolverState& s, const config::RunConfig& c,
                       const VectorField& g) {
  try {
    const auto guard = c.solver.guard();
    const auto e = solver::energy_terms(s.rho, s.u, c.phys, c.kernels, s.eps, s.delta, g, guard);
    return Json{{"mass_error", std::abs(s.rho.mean() - c.phys.M)},
                {"min_rho", spectral::min_value(s.rho)},
                {"energy", report::to_json(e)},
                {"monitors", report::to_json(solver::monitors(s, c.phys, c.kernels, guard))}};
  } catch (const std::exception& e) {
    return Json{{"error", e.what()}};
  }
}

inline void dump_state(const std::filesystem::path& dir, const std::string& prefix,
                       const solver::SolverState& s) {
  io::save_field((dir / (prefix + "rho.field")).string(), s.rho);
  io::save_field((dir / (prefix + "u.field")).string(), s.u);
}

inline std::optional<VectorField> initial_velocity(const config::RunConfig& c, Grid grid,
                                                   std::uint64_t seed) {
  if (c.init_perturbation <= 0.0) return std::nullopt;
  auto v = random_trig_vector(grid, 2, seed, c.init_perturbation, true);
  return VectorField(spectral::dealias(v[0]), spectral::dealias(v[1]), spectral::dealias(v[2]));
}

inline solver::SolverState load_state(const config::RunConfig& c, Grid grid) {
  auto loaded_u = io::load_field(c.input_u);
  if (!std::holds_alternative<VectorField>(loaded_u)) {
    throw config::ConfigError("input.u", "field dump is not a vector field");
  }
  auto u = std::get<VectorField>(std::move(loaded_u));
  if (u.grid().n() != grid.n()) throw config::ConfigError("input.u", "grid size differs from grid.n");
  solver::SolverState s = solver::SolverState::trivial(grid, c.phys, c.eps, c.delta);
  s.u = u;
  if (!c.input_rho.empty()) {
    auto loaded_rho = io::load_field(c.input_rho);
    if (!std::holds_alternative<ScalarField>(loaded_rho)) {
      throw config::ConfigError("input.rho", "field dump is not a scalar field");
    }
    s.rho = std::get<ScalarField>(std::move(loaded_rho));
    if (s.rho.grid().n() != grid.n()) {
      throw config::ConfigError("input.rho", "grid size differs from grid.n");
    }
  } else {
    s.rho = transport::solve_transport(u, c.phys, c.eps, c.delta, c.solver.transport_config()).rho;
  }
  s.converged = true;
  s.status = "loaded";
  return s;
}

}  // namespace detail

/// Executes one run and returns the process exit code. Messages go to `err`.
inline int run(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  namespace fs = std::filesystem;
  using report::Json;

  if (!valid_mode(opt.mode)) {
    err << "error: unknown mode '" << opt.mode << "'\n";
    return config_error;
  }

  config::RunConfig cfg;
  try {
    cfg = config::load(opt.config_path);
  } catch (const config::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }

  const fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create output directory " << opt.out_dir << ": " << ec.message() << '\n';
    return config_error;
  }

  try {
    const Grid grid(cfg.n);
    const auto g = config::build_forcing(grid, cfg.forcing);
    const auto hyp = hypothesis::check_hypothesis_H(cfg.phys, cfg.kernels, g);
    const auto mult = multiplier::analyze(cfg.phys, cfg.C, cfg.c0);

    Json rep;
    rep["mode"] = opt.mode;
    rep["seed"] = opt.seed;
    rep["config"] = report::resolved_config(cfg);
    rep["hypothesis"] = report::to_json(hyp);
    rep["multiplier"] = report::to_json(mult);
    const auto report_path = (dir / "report.json").string();

    if (opt.mode == "check-hypotheses") {
      report::save(report_path, rep);
      out << "(H) " << (hyp.passed() ? "holds" : "failed: " + hyp.failures())
          << "; smallness " << report::format_double(mult.smallness_value) << '\n';
      return hyp.passed() ? ok : hypothesis_failed;
    }

    if (!hyp.passed()) {
      err << "(H) failed: " << hyp.failures() << '\n';
      if (opt.strict) {
        rep["aborted"] = "(H) failed: " + hyp.failures();
        report::save(report_path, rep);
        return hypothesis_failed;
      }
    }

    const auto initial = detail::initial_velocity(cfg, grid, opt.seed);

    if (opt.mode == "continuation") {
      const auto res =
          solver::continuation_run(cfg.phys, cfg.kernels, g, cfg.solver, initial);
      Json states = Json::array();
      for (std::size_t i = 0; i < res.states.size(); ++i) {
        const auto& s = res.states[i];
        const std::string prefix = "state_" + std::to_string(i) + "_";
        report::save_iteration_log((dir / (prefix + "iterations.csv")).string(), s.log);
        if (opt.dump_fields) detail::dump_state(dir, prefix, s);
        Json st = report::state_summary(s);
        st["monitors"] = report::to_json(res.monitors[i]);
        st["within_calibration"] = solver::within_calibration(res.monitors[i], res.calibration);
        st["diagnostics"] = detail::diagnostics_json(s, cfg, g);
        states.push_back(std::move(st));
        out << "state " << i << " eps=" << s.eps << " delta=" << s.delta << ": " << s.status
            << " after " << s.iteration << " iterations\n";
      }
      rep["calibration"] = res.calibration;
      rep["completed"] = res.completed;
      rep["states"] = std::move(states);
      report::save(report_path, rep);
      return res.completed ? ok : not_converged;
    }

    const bool loaded = opt.mode == "diagnose" && !cfg.input_u.empty();
    const auto state = loaded ? detail::load_state(cfg, grid)
                              : solver::fixed_point_solve(cfg.phys, cfg.kernels, g, cfg.eps,
                                                          cfg.delta, cfg.solver, initial);
    if (!loaded) report::save_iteration_log((dir / "iterations.csv").string(), state.log);
    if (opt.dump_fields) detail::dump_state(dir, "", state);

    rep["state"] = report::state_summary(state);
    rep["trivial_state"] = detail::is_trivial(state, cfg.phys);
    if (opt.mode == "diagnose") {
      rep["diagnostics"] = detail::diagnostics_json(state, cfg, g);
      if (opt.dump_fields) {
        const auto fl = diagnostics::effective_fluxes(state.rho, state.u, cfg.phys, cfg.kernels,
                                                      cfg.solver.guard());
        io::save_field((dir / "flux_F.field").string(), fl.F);
        io::save_field((dir / "flux_Fan.field").string(), fl.F_an);
        io::save_field((dir / "flux_tildeFan.field").string(), fl.tilde_F_an);
      }
    } else {
      rep["summary"] = detail::brief_json(state, cfg, g);
    }
    report::save(report_path, rep);
    out << state.status << " after " << state.iteration << " iterations, r_mass "
        << report::format_double(state.r_mass) << ", r_mom " << report::format_double(state.r_mom)
        << '\n';
    return state.converged ? ok : not_converged;
  } catch (const config::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return not_converged;
  }
}

}  // namespace anisoflow::app
