#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "anisoflow/config.hpp"
#include "anisoflow/diagnostics.hpp"
#include "anisoflow/hypothesis.hpp"
#include "anisoflow/multiplier.hpp"
#include "anisoflow/solver.hpp"

// JSON report assembly. Numbers are written with 17 significant digits so
// identical runs produce identical bytes; non-finite numbers become null.

namespace anisoflow::report {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void indent(std::ostream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

inline void write(std::ostream& os, const Json& j, int depth) {
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        indent(os, depth + 1);
        os << Json(key).dump() << ": ";
        write(os, value, depth + 1);
      }
      os << '\n';
      indent(os, depth);
      os << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) os << ",\n";
        indent(os, depth + 1);
        write(os, j[i], depth + 1);
      }
      os << '\n';
      indent(os, depth);
      os << ']';
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

inline std::string dump(const Json& j) {
  std::ostringstream os;
  detail::write(os, j, 0);
  os << '\n';
  return os.str();
}

inline void save(const std::string& path, const Json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << dump(j);
}

inline Json list(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

/// Every key of the resolved configuration, defaults included.
inline Json resolved_config(const config::RunConfig& c) {
  Json j;
  j["grid.n"] = c.n;
  j["phys.mu"] = c.phys.mu;
  j["phys.lambda"] = c.phys.lambda;
  j["phys.theta"] = c.phys.theta;
  j["phys.a"] = c.phys.a;
  j["phys.gamma"] = c.phys.gamma;
  j["phys.M"] = c.phys.M;
  j["reg.eps"] = c.eps;
  j["reg.delta"] = c.delta;
  j["kernels.eta"] = c.eta_text;
  j["kernels.xi"] = c.xi_text;
  Json modes = Json::array();
  for (const auto& m : c.forcing) {
    modes.push_back({{"k", {m.k[0], m.k[1], m.k[2]}},
                     {"amplitude", {m.amplitude[0], m.amplitude[1], m.amplitude[2]}},
                     {"profile", m.cosine ? "cos" : "sin"}});
  }
  j["forcing.modes"] = modes;
  j["solver.tol"] = c.solver.tol;
  j["solver.max_iter"] = c.solver.max_iter;
  j["solver.relax"] = c.solver.relax;
  j["solver.min_relax"] = c.solver.min_relax;
  j["solver.pos_tol"] = c.solver.pos_tol;
  j["solver.rho_floor"] = c.solver.rho_floor;
  j["solver.stall_window"] = c.solver.stall_window;
  j["solver.homotopy"] = list(c.solver.homotopy_schedule);
  j["solver.homotopy_tol"] = c.solver.homotopy_tol;
  j["solver.init_perturbation"] = c.init_perturbation;
  j["transport.tol"] = c.solver.transport.tol;
  j["transport.max_iter"] = c.solver.transport.max_iter;
  j["transport.relax"] = c.solver.transport.relax;
  Json sched = Json::array();
  for (const auto& pt : c.schedule()) sched.push_back({{"eps", pt.eps}, {"delta", pt.delta}});
  j["schedule"] = sched;
  j["analysis.C"] = c.C;
  j["analysis.c0"] = c.c0;
  j["analysis.alpha"] = c.alpha ? Json(*c.alpha) : Json(2.0 * c.phys.gamma - 3.0);
  j["analysis.commutator_deltas"] = list(c.commutator_deltas);
  if (!c.input_rho.empty()) j["input.rho"] = c.input_rho;
  if (!c.input_u.empty()) j["input.u"] = c.input_u;
  return j;
}

inline Json to_json(const hypothesis::Report& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    conds.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
  }
  return {{"passed", r.passed()},
          {"failures", r.failures()},
          {"conditions", conds},
          {"kernel_alternative", hypothesis::to_string(r.alternative)},
          {"eta_l1", r.eta_l1},
          {"xi_l1", r.xi_l1},
          {"small_l1_margin", r.small_l1_margin},
          {"forcing_exponent", r.forcing_exponent},
          {"forcing_norm", r.forcing_norm}};
}

inline Json to_json(const multiplier::MultiplierReport& m) {
  return {{"sup_abs_m", m.sup_abs_m},
          {"mihlin_A0", m.mihlin_A0},
          {"mihlin_A1", m.mihlin_A1},
          {"mihlin_A2", m.mihlin_A2},
          {"norm_bound", m.norm_bound_value},
          {"smallness_value", m.smallness_value},
          {"c0", m.c0},
          {"passes_smallness", m.passes_smallness}};
}

inline Json to_json(const solver::Monitors& m) {
  return {{"delta_int_rho_gamma", m.delta_rho_gamma},
          {"eps_grad_rho_half_sq", m.eps_grad_rho_half},
          {"dissipation", m.dissipation},
          {"rho_norm", m.rho_norm},
          {"grad_u_norm", m.grad_u_norm},
          {"eps_cross_norm", m.eps_cross_norm},
          {"energy_lhs", m.energy_lhs}};
}

inline Json to_json(const solver::EnergyTerms& e) {
  return {{"dissipation", e.dissipation},   {"damping", e.damping},
          {"density_gradient", e.density_gradient}, {"pressure", e.pressure},
          {"forcing", e.forcing},           {"mass", e.mass},
          {"defect", e.defect()},           {"relative_defect", e.relative_defect()}};
}

inline Json to_json(const diagnostics::BootstrapTerms& b) {
  Json t = Json::array();
  for (double v : b.T) t.push_back(v);
  return {{"alpha", b.alpha},
          {"T", t},
          {"T_delta", b.T_delta},
          {"a_int_rho_alpha_gamma", b.rho_alpha_gamma},
          {"decomposition_residual", b.decomposition_residual},
          {"t2_nonpositive", b.t2_nonpositive},
          {"t3_ratio", b.t3_ratio},
          {"smallness_value", b.smallness_value},
          {"t3_within_smallness", b.t3_within_smallness}};
}

inline Json keyed(const std::map<double, double>& m) {
  Json a = Json::array();
  for (const auto& [k, v] : m) a.push_back({k, v});
  return a;
}

inline Json to_json(const diagnostics::DiagnosticsReport& r) {
  return {{"mass_error", r.mass_error},
          {"mean_u_error", r.mean_u_error},
          {"min_rho", r.min_rho},
          {"r_mass", r.r_mass},
          {"r_mom", r.r_mom},
          {"energy", to_json(r.energy)},
          {"energy_defect", r.energy_defect},
          {"coercivity_lhs", r.coercivity.lhs},
          {"coercivity_rhs_small_l1", r.coercivity.rhs1},
          {"coercivity_rhs_nonnegative", r.coercivity.rhs2},
          {"flux_F_norm", r.flux_F_norm},
          {"flux_Fan_norm", r.flux_Fan_norm},
          {"flux_tildeFan_norm", r.flux_tildeFan_norm},
          {"flux_tildeFan_gen_norm", r.flux_tildeFan_gen_norm},
          {"renorm_residuals", keyed(r.renorm_residuals)},
          {"commutator_residuals", keyed(r.commutator_residuals)},
          {"bootstrap_terms", to_json(r.bootstrap)},
          {"multiplier", to_json(r.multiplier)},
          {"monitors", to_json(r.monitors)}};
}

inline Json state_summary(const solver::SolverState& s) {
  return {{"eps", s.eps},
          {"delta", s.delta},
          {"converged", s.converged},
          {"status", s.status},
          {"iterations", s.iteration},
          {"r_mass", s.r_mass},
          {"r_mom", s.r_mom},
          {"final_relax", s.relax}};
}

inline void save_iteration_log(const std::string& path,
                               const std::vector<solver::IterationRecord>& log) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "iteration,r_mass,r_mom,energy_defect,min_rho,relax,homotopy\n";
  for (const auto& r : log) {
    os << r.iteration << ',' << format_double(r.r_mass) << ',' << format_double(r.r_mom) << ','
       << format_double(r.energy_defect) << ',' << format_double(r.min_rho) << ','
       << format_double(r.relax) << ',' << format_double(r.homotopy) << '\n';
  }
}

}  // namespace anisoflow::report
