#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anisoflow/field.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/momentum.hpp"
#include "anisoflow/operators.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/spectral.hpp"
#include "anisoflow/transport.hpp"

namespace anisoflow::solver {

struct RegPoint {
  double eps = 0.1;
  double delta = 0.1;
  bool operator==(const RegPoint&) const = default;
};

struct SolverConfig {
  double tol = 1e-10;           // on both system residuals (absolute discrete L^2)
  int max_iter = 2000;
  double relax = 0.5;
  double min_relax = 1e-3;
  double pos_tol = 1e-8;
  double rho_floor = 1e-14;
  int stall_window = 200;
  std::vector<double> homotopy_schedule{1.0};
  double homotopy_tol = 1e-6;   // stage tolerance for homotopy values below 1
  transport::TransportConfig transport{};
  std::vector<RegPoint> continuation_schedule{};

  momentum::DensityGuard guard() const { return {pos_tol, rho_floor}; }
  transport::TransportConfig transport_config() const {
    auto t = transport;
    t.pos_tol = pos_tol;
    return t;
  }
  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("solver.tol must be positive");
    if (!(relax > 0.0 && relax <= 1.0)) throw std::invalid_argument("solver.relax must lie in (0,1]");
    if (max_iter < 1) throw std::invalid_argument("solver.max_iter must be at least 1");
    if (stall_window < 1) throw std::invalid_argument("solver.stall_window must be at least 1");
    if (homotopy_schedule.empty()) throw std::invalid_argument("solver.homotopy must not be empty");
    for (double h : homotopy_schedule) {
      if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("solver.homotopy values must lie in (0,1]");
    }
    if (homotopy_schedule.back() != 1.0) {
      throw std::invalid_argument("solver.homotopy must end at 1");
    }
  }
};

/// One row of the per-iteration log.
struct IterationRecord {
  int iteration = 0;
  double r_mass = 0.0;
  double r_mom = 0.0;
  double energy_defect = 0.0;
  double min_rho = 0.0;
  double relax = 0.0;
  double homotopy = 1.0;
};

struct SolverState {
  VectorField u;
  ScalarField rho;
  double eps = 0.1;
  double delta = 0.1;
  double homotopy = 1.0;
  int iteration = 0;
  std::vector<double> residual_history{};
  std::vector<IterationRecord> log{};
  bool converged = false;
  double r_mass = 0.0;
  double r_mom = 0.0;
  double relax = 0.5;
  std::string status{};

  static SolverState trivial(Grid grid, const PhysParams& p, double eps, double delta) {
    SolverState s{VectorField(grid), ScalarField::constant(grid, p.M)};
    s.eps = eps;
    s.delta = delta;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Residuals and energy bookkeeping.

struct SystemResidual {
  double r_mass = 0.0;
  double r_mom = 0.0;
  double max() const noexcept { return std::max(r_mass, r_mom); }
};

/// Defects of both regularized equations at (rho, u), assembled from scratch.
/// The momentum defect is that of -A u = h RHS for the state's homotopy h.
inline SystemResidual system_residual(const SolverState& s, const PhysParams& p,
                                      const KernelSpec& ker, const VectorField& g,
                                      const momentum::DensityGuard& guard = {}) {
  SystemResidual r;
  r.r_mass = transport::transport_residual(s.rho, s.u, p, s.eps, s.delta);
  const auto rhs = momentum::momentum_rhs(s.rho, s.u, p, ker, s.eps, s.delta, g, guard);
  r.r_mom = spectral::l2_norm(ops::apply_A(s.u, p, ker) + s.homotopy * rhs);
  return r;
}

/// Terms of the energy identity satisfied by exact solutions:
///   dissipation + damping + density_gradient + pressure - forcing - mass = 0.
struct EnergyTerms {
  double dissipation = 0.0;       // -int <A u, u>
  double damping = 0.0;           // (delta M / 2) int |u|^2
  double density_gradient = 0.0;  // a (4 eps / gamma) int |grad rho^{gamma/2}|^2
  double pressure = 0.0;          // a (gamma delta / (gamma - 1)) int rho^gamma
  double forcing = 0.0;           // int (w_delta * g) . u
  double mass = 0.0;              // a (gamma delta M / (gamma - 1)) int rho^{gamma - 1}

  double defect() const noexcept {
    return dissipation + damping + density_gradient + pressure - forcing - mass;
  }
  double scale() const noexcept {
    return std::max({std::abs(dissipation), std::abs(damping), std::abs(density_gradient),
                     std::abs(pressure), std::abs(forcing), std::abs(mass)});
  }
  double relative_defect() const noexcept {
    const double s = scale();
    return s > 0.0 ? std::abs(defect()) / s : std::abs(defect());
  }
};

inline double grad_sq_integral(const ScalarField& f) {
  const auto d = spectral::gradient(f);
  return spectral::inner(d, d);
}

inline double grad_sq_integral(const VectorField& u) {
  return grad_sq_integral(u[0]) + grad_sq_integral(u[1]) + grad_sq_integral(u[2]);
}

inline EnergyTerms energy_terms(const ScalarField& rho, const VectorField& u, const PhysParams& p,
                                const KernelSpec& ker, double eps, double delta,
                                const VectorField& g, const momentum::DensityGuard& guard = {}) {
  const double gm = p.gamma;
  EnergyTerms e;
  e.dissipation = ops::dissipation(u, p, ker);
  e.damping = 0.5 * delta * p.M * spectral::inner(u, u);
  e.density_gradient =
      p.a * (4.0 * eps / gm) * grad_sq_integral(momentum::density_power(rho, 0.5 * gm, guard));
  e.pressure = p.a * (gm * delta / (gm - 1.0)) *
               spectral::integral(momentum::density_power(rho, gm, guard));
  e.forcing = spectral::inner(ops::mollify(g, delta), u);
  e.mass = p.a * (gm * delta * p.M / (gm - 1.0)) *
           spectral::integral(momentum::density_power(rho, gm - 1.0, guard));
  return e;
}

/// The left-hand side of the uniform energy estimate,
///   -1/2 int <A u,u> + (delta M/2) int|u|^2
///   + a (4 eps/(gamma(gamma-1))) int|grad rho^{gamma/2}|^2 + a (gamma delta/2) int rho^gamma.
inline double energy_bound_lhs(const ScalarField& rho, const VectorField& u, const PhysParams& p,
                               const KernelSpec& ker, double eps, double delta,
                               const momentum::DensityGuard& guard = {}) {
  const double gm = p.gamma;
  return 0.5 * ops::dissipation(u, p, ker) + 0.5 * delta * p.M * spectral::inner(u, u) +
         p.a * (4.0 * eps / (gm * (gm - 1.0))) *
             grad_sq_integral(momentum::density_power(rho, 0.5 * gm, guard)) +
         p.a * 0.5 * gm * delta * spectral::integral(momentum::density_power(rho, gm, guard));
}

// ---------------------------------------------------------------------------
// Damped Picard iteration u <- (1 - r) u + r h S(u).

using IterationObserver = std::function<void(const IterationRecord&)>;

inline SolverState fixed_point_solve(const PhysParams& p, const KernelSpec& ker,
                                     const VectorField& g, double eps, double delta,
                                     const SolverConfig& cfg,
                                     std::optional<VectorField> warm_start = std::nullopt,
                                     const IterationObserver& observer = {}) {
  cfg.validate();
  const Grid& grid = g.grid();
  const auto guard = cfg.guard();
  const auto tcfg = cfg.transport_config();

  VectorField u(grid);
  if (warm_start) {
    require_same_grid(warm_start->grid(), grid);
    u = spectral::project_mean_zero(*warm_start);
  }

  SolverState best = SolverState::trivial(grid, p, eps, delta);
  double best_res = std::numeric_limits<double>::infinity();
  SolverState state = best;
  state.relax = cfg.relax;

  double relax = cfg.relax;
  int iteration = 0;
  for (std::size_t stage = 0; stage < cfg.homotopy_schedule.size(); ++stage) {
    const double h = cfg.homotopy_schedule[stage];
    const bool last = stage + 1 == cfg.homotopy_schedule.size();
    const double stage_tol = last ? cfg.tol : cfg.homotopy_tol;
    double prev_res = std::numeric_limits<double>::infinity();
    int increases = 0;
    int since_best = 0;
    bool stage_done = false;

    while (iteration < cfg.max_iter) {
      auto S = momentum::apply_S(u, p, ker, eps, delta, g, tcfg, guard);

      SolverState cur{u, S.rho};
      cur.eps = eps;
      cur.delta = delta;
      cur.homotopy = h;
      cur.iteration = iteration;
      const auto res = system_residual(cur, p, ker, g, guard);

      IterationRecord rec;
      rec.iteration = iteration;
      rec.r_mass = res.r_mass;
      rec.r_mom = res.r_mom;
      rec.energy_defect = energy_terms(S.rho, u, p, ker, eps, delta, g, guard).defect();
      rec.min_rho = spectral::min_value(S.rho);
      rec.relax = relax;
      rec.homotopy = h;
      state.log.push_back(rec);
      state.residual_history.push_back(res.max());
      if (observer) observer(rec);

      if (!std::isfinite(res.max())) {
        state.status = "non-finite residual";
        break;
      }

      if (last) {
        if (res.max() < best_res) {
          best_res = res.max();
          best.u = u;
          best.rho = S.rho;
          best.r_mass = res.r_mass;
          best.r_mom = res.r_mom;
          best.iteration = iteration;
          since_best = 0;
        } else {
          ++since_best;
        }
      }

      if (res.r_mass <= stage_tol && res.r_mom <= stage_tol) {
        stage_done = true;
        state.u = u;
        state.rho = S.rho;
        state.r_mass = res.r_mass;
        state.r_mom = res.r_mom;
        break;
      }

      if (res.max() > prev_res) {
        if (++increases >= 2) {
          relax *= 0.5;
          increases = 0;
        }
      } else {
        increases = 0;
      }
      prev_res = res.max();
      if (relax < cfg.min_relax) {
        state.status = "damping fell below the minimum";
        break;
      }
      if (last && since_best >= cfg.stall_window) {
        state.status = "residual stalled";
        break;
      }

      u = (1.0 - relax) * u + (relax * h) * S.u;
      u = spectral::project_mean_zero(u);
      ++iteration;
    }

    if (!stage_done) {
      if (state.status.empty()) state.status = "iteration limit reached";
      // Best iterate at the final homotopy value, flagged non-converged.
      SolverState out = last && std::isfinite(best_res) ? best
                                                        : SolverState::trivial(grid, p, eps, delta);
      if (!(last && std::isfinite(best_res))) {
        out.u = u;
        out.rho = transport::solve_transport(u, p, eps, delta, tcfg).rho;
        const auto r = system_residual(out, p, ker, g, guard);
        out.r_mass = r.r_mass;
        out.r_mom = r.r_mom;
      }
      out.eps = eps;
      out.delta = delta;
      out.homotopy = h;
      out.iteration = iteration;
      out.residual_history = std::move(state.residual_history);
      out.log = std::move(state.log);
      out.converged = false;
      out.relax = relax;
      out.status = state.status;
      return out;
    }
  }

  state.eps = eps;
  state.delta = delta;
  state.homotopy = 1.0;
  state.iteration = iteration;
  state.converged = true;
  state.relax = relax;
  state.status = "converged";
  return state;
}

// ---------------------------------------------------------------------------
// Continuation in (eps, delta).

/// delta walks its list at the first eps, then eps walks the rest of its
/// list at the last delta. Consecutive duplicates are dropped.
inline std::vector<RegPoint> build_schedule(const std::vector<double>& eps_list,
                                            const std::vector<double>& delta_list) {
  if (eps_list.empty() || delta_list.empty()) {
    throw std::invalid_argument("continuation schedule needs at least one eps and one delta");
  }
  std::vector<RegPoint> out;
  auto push = [&out](RegPoint pt) {
    if (!(pt.eps > 0.0 && pt.eps <= 1.0) || !(pt.delta > 0.0 && pt.delta <= 1.0)) {
      throw std::invalid_argument("schedule values must lie in (0,1]");
    }
    if (out.empty() || !(out.back() == pt)) out.push_back(pt);
  };
  for (double d : delta_list) push({eps_list.front(), d});
  for (std::size_t i = 1; i < eps_list.size(); ++i) push({eps_list[i], delta_list.back()});
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].eps > out[i - 1].eps || out[i].delta > out[i - 1].delta) {
      throw std::invalid_argument("continuation schedule must be nonincreasing");
    }
  }
  return out;
}

/// Quantities expected to stay uniformly bounded along the continuation.
struct Monitors {
  double delta_rho_gamma = 0.0;      // delta int rho^gamma
  double eps_grad_rho_half = 0.0;    // eps |grad rho^{gamma/2}|_2^2
  double dissipation = 0.0;          // -int <A u, u>
  double rho_norm = 0.0;             // |rho|_{L^{3(gamma-1)}}
  double grad_u_norm = 0.0;          // |grad u|_{L^{3(gamma-1)/gamma}}
  double eps_cross_norm = 0.0;       // eps |(grad u) grad rho|_{L^{3(gamma-1)/(2gamma-1)}}
  double energy_lhs = 0.0;           // left side of the uniform energy estimate
};

inline Monitors monitors(const SolverState& s, const PhysParams& p, const KernelSpec& ker,
                         const momentum::DensityGuard& guard = {}) {
  const double gm = p.gamma;
  Monitors m;
  m.delta_rho_gamma = s.delta * spectral::integral(momentum::density_power(s.rho, gm, guard));
  m.eps_grad_rho_half = s.eps * grad_sq_integral(momentum::density_power(s.rho, 0.5 * gm, guard));
  m.dissipation = ops::dissipation(s.u, p, ker);
  m.rho_norm = spectral::lp_norm(s.rho, 3.0 * (gm - 1.0));

  std::vector<ScalarField> grads;
  grads.reserve(9);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) grads.push_back(spectral::derivative(s.u[i], j));
  }
  m.grad_u_norm = spectral::lp_norm_magnitude(grads, 3.0 * (gm - 1.0) / gm);

  const auto grad_rho = spectral::gradient(s.rho);
  std::vector<ScalarField> cross;
  for (int i = 0; i < 3; ++i) {
    ScalarField c(s.rho.grid());
    for (int j = 0; j < 3; ++j) c = c + spectral::product(grads[3 * i + j], grad_rho[j]);
    cross.push_back(std::move(c));
  }
  m.eps_cross_norm = s.eps * spectral::lp_norm_magnitude(cross, 3.0 * (gm - 1.0) / (2.0 * gm - 1.0));
  m.energy_lhs = energy_bound_lhs(s.rho, s.u, p, ker, s.eps, s.delta, guard);
  return m;
}

struct ContinuationResult {
  std::vector<SolverState> states;
  std::vector<Monitors> monitors;
  double calibration = 0.0;  // 1.1 x energy estimate left side at the first state
  bool completed = false;
};

/// Runs the schedule, warm-starting each point from the previous velocity.
/// Stops at the first non-converged point and returns the partial list.
inline ContinuationResult continuation_run(
    const PhysParams& p, const KernelSpec& ker, const VectorField& g, const SolverConfig& cfg,
    std::optional<VectorField> initial = std::nullopt,
    const std::function<void(std::size_t, const IterationRecord&)>& observer = {}) {
  if (cfg.continuation_schedule.empty()) {
    throw std::invalid_argument("continuation schedule is empty");
  }
  ContinuationResult out;
  std::optional<VectorField> warm = std::move(initial);
  for (std::size_t i = 0; i < cfg.continuation_schedule.size(); ++i) {
    const auto pt = cfg.continuation_schedule[i];
    IterationObserver obs;
    if (observer) obs = [&observer, i](const IterationRecord& r) { observer(i, r); };
    auto state = fixed_point_solve(p, ker, g, pt.eps, pt.delta, cfg, warm, obs);
    out.monitors.push_back(monitors(state, p, ker, cfg.guard()));
    if (i == 0) out.calibration = 1.1 * out.monitors.front().energy_lhs;
    const bool ok = state.converged;
    warm = state.u;
    out.states.push_back(std::move(state));
    if (!ok) return out;
  }
  out.completed = true;
  return out;
}

/// True when every bounded monitor stays below the first-state calibration.
inline bool within_calibration(const Monitors& m, double calibration) {
  return m.delta_rho_gamma <= calibration && m.eps_grad_rho_half <= calibration &&
         m.energy_lhs <= calibration;
}

}  // namespace anisoflow::solver
