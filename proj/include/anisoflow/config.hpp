#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anisoflow/field.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/params.hpp"
#include "anisoflow/solver.hpp"

// Flat "key = value" configuration with dotted sections. '#' starts a comment.
//
//   grid.n = 16
//   phys.gamma = 4
//   kernels.eta = gaussian(0.1, 0.2)
//   kernels.xi = modes: 1 0 0 0.1; 0 0 1 0.05
//   forcing.modes = 1 0 0  1 0 0 sin; 0 0 1  0 0 0.5 cos
//   schedule.delta = 0.1, 0.01, 0.001

namespace anisoflow::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// One forcing term amplitude * sin(2 pi k.x) (or cos).
struct ForcingMode {
  Wavevector k{};
  std::array<double, 3> amplitude{};
  bool cosine = false;
};

struct RunConfig {
  int n = 16;
  PhysParams phys{};
  double eps = 0.1;
  double delta = 0.1;
  std::string eta_text = "none";
  std::string xi_text = "none";
  KernelSpec kernels{};
  std::string forcing_text;
  std::vector<ForcingMode> forcing;
  solver::SolverConfig solver{};
  double init_perturbation = 0.0;
  std::vector<double> schedule_eps;
  std::vector<double> schedule_delta;
  double C = 1.0;
  double c0 = 0.05;
  std::optional<double> alpha;
  std::vector<double> commutator_deltas{1e-1, 1e-2, 1e-3};
  std::string input_rho;
  std::string input_u;

  /// The (eps, delta) schedule for continuation runs.
  std::vector<solver::RegPoint> schedule() const {
    const auto e = schedule_eps.empty() ? std::vector<double>{eps} : schedule_eps;
    const auto d = schedule_delta.empty() ? std::vector<double>{delta} : schedule_delta;
    return solver::build_schedule(e, d);
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

inline double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  if (!std::isfinite(v)) throw ConfigError(key, "value must be finite");
  return v;
}

inline long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

inline std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::string s = text;
  for (auto& c : s) {
    if (c == ',') c = ' ';
  }
  std::vector<double> out;
  for (const auto& t : tokens(s)) out.push_back(to_double(key, t));
  if (out.empty()) throw ConfigError(key, "list must not be empty");
  return out;
}

inline Kernel to_kernel(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "none" || t.empty()) return Kernel{};
  if (t.rfind("gaussian", 0) == 0) {
    const auto open = t.find('(');
    const auto close = t.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open ||
        trim(t.substr(close + 1)) != "" || trim(t.substr(8, open - 8)) != "") {
      throw ConfigError(key, "expected gaussian(sigma, amplitude)");
    }
    const auto args = split(std::string_view(t).substr(open + 1, close - open - 1), ',');
    if (args.size() != 2) throw ConfigError(key, "gaussian takes two arguments");
    const double sigma = to_double(key, args[0]);
    const double amp = to_double(key, args[1]);
    if (!(sigma > 0.0)) throw ConfigError(key, "gaussian sigma must be positive");
    return Kernel::gaussian(sigma, amp);
  }
  if (t.rfind("modes:", 0) == 0) {
    std::vector<std::pair<Wavevector, double>> entries;
    for (const auto& entry : split(std::string_view(t).substr(6), ';')) {
      if (entry.empty()) continue;
      const auto f = tokens(entry);
      if (f.size() != 4) throw ConfigError(key, "kernel mode entries are 'kx ky kz value'");
      Wavevector k{static_cast<int>(to_integer(key, f[0])), static_cast<int>(to_integer(key, f[1])),
                   static_cast<int>(to_integer(key, f[2]))};
      entries.emplace_back(k, to_double(key, f[3]));
    }
    try {
      return Kernel::from_modes(std::move(entries));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  }
  throw ConfigError(key, "expected 'none', 'gaussian(sigma, amplitude)' or 'modes: ...'");
}

inline std::vector<ForcingMode> to_forcing(const std::string& key, const std::string& text) {
  std::vector<ForcingMode> out;
  for (const auto& entry : split(text, ';')) {
    if (entry.empty()) continue;
    auto f = tokens(entry);
    ForcingMode m;
    if (f.size() == 7) {
      if (f[6] == "cos") {
        m.cosine = true;
      } else if (f[6] != "sin") {
        throw ConfigError(key, "forcing profile must be 'sin' or 'cos', got '" + f[6] + "'");
      }
      f.pop_back();
    }
    if (f.size() != 6) throw ConfigError(key, "forcing entries are 'kx ky kz ax ay az [sin|cos]'");
    for (int c = 0; c < 3; ++c) m.k[c] = static_cast<int>(to_integer(key, f[c]));
    for (int c = 0; c < 3; ++c) m.amplitude[c] = to_double(key, f[3 + c]);
    if (m.k[0] == 0 && m.k[1] == 0 && m.k[2] == 0) {
      throw ConfigError(key, "the k = 0 forcing mode is forbidden (forcing must have zero mean)");
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace detail

/// Parses configuration text. Every error names the offending key.
inline RunConfig parse(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const auto key = detail::trim(std::string_view(t).substr(0, eq));
    const auto value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "missing key");
    if (!kv.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }

  RunConfig c;
  auto num = [](const std::string& k, const std::string& v) { return detail::to_double(k, v); };
  auto positive = [&num](const std::string& k, const std::string& v) {
    const double x = num(k, v);
    if (!(x > 0.0)) throw ConfigError(k, "must be positive");
    return x;
  };
  auto count = [](const std::string& k, const std::string& v) {
    const auto x = detail::to_integer(k, v);
    if (x < 1 || x > 100000000) throw ConfigError(k, "must be a positive integer");
    return static_cast<int>(x);
  };
  auto unit = [&num](const std::string& k, const std::string& v) {
    const double x = num(k, v);
    if (!(x > 0.0 && x <= 1.0)) throw ConfigError(k, "must lie in (0,1]");
    return x;
  };

  for (const auto& [k, v] : kv) {
    if (k == "grid.n") {
      const auto n = detail::to_integer(k, v);
      if (n < 4 || n > 1024 || (n & (n - 1)) != 0) {
        throw ConfigError(k, "must be a power of two >= 4");
      }
      c.n = static_cast<int>(n);
    } else if (k == "phys.mu") {
      c.phys.mu = num(k, v);
    } else if (k == "phys.lambda") {
      c.phys.lambda = num(k, v);
    } else if (k == "phys.theta") {
      c.phys.theta = num(k, v);
    } else if (k == "phys.a") {
      c.phys.a = num(k, v);
    } else if (k == "phys.gamma") {
      c.phys.gamma = num(k, v);
    } else if (k == "phys.M") {
      c.phys.M = num(k, v);
    } else if (k == "reg.eps") {
      c.eps = unit(k, v);
    } else if (k == "reg.delta") {
      c.delta = unit(k, v);
    } else if (k == "kernels.eta") {
      c.eta_text = v;
      c.kernels.eta = detail::to_kernel(k, v);
    } else if (k == "kernels.xi") {
      c.xi_text = v;
      c.kernels.xi = detail::to_kernel(k, v);
    } else if (k == "forcing.modes") {
      c.forcing_text = v;
      c.forcing = detail::to_forcing(k, v);
    } else if (k == "solver.tol") {
      c.solver.tol = positive(k, v);
    } else if (k == "solver.max_iter") {
      c.solver.max_iter = count(k, v);
    } else if (k == "solver.relax") {
      c.solver.relax = unit(k, v);
    } else if (k == "solver.min_relax") {
      c.solver.min_relax = positive(k, v);
    } else if (k == "solver.pos_tol") {
      c.solver.pos_tol = positive(k, v);
    } else if (k == "solver.rho_floor") {
      c.solver.rho_floor = positive(k, v);
    } else if (k == "solver.stall_window") {
      c.solver.stall_window = count(k, v);
    } else if (k == "solver.homotopy") {
      c.solver.homotopy_schedule = detail::to_list(k, v);
      for (double h : c.solver.homotopy_schedule) {
        if (!(h > 0.0 && h <= 1.0)) throw ConfigError(k, "values must lie in (0,1]");
      }
      if (c.solver.homotopy_schedule.back() != 1.0) throw ConfigError(k, "must end at 1");
    } else if (k == "solver.homotopy_tol") {
      c.solver.homotopy_tol = positive(k, v);
    } else if (k == "solver.init_perturbation") {
      c.init_perturbation = num(k, v);
      if (c.init_perturbation < 0.0) throw ConfigError(k, "must be nonnegative");
    } else if (k == "transport.tol") {
      c.solver.transport.tol = positive(k, v);
    } else if (k == "transport.max_iter") {
      c.solver.transport.max_iter = count(k, v);
    } else if (k == "transport.relax") {
      c.solver.transport.relax = unit(k, v);
    } else if (k == "schedule.eps") {
      c.schedule_eps = detail::to_list(k, v);
    } else if (k == "schedule.delta") {
      c.schedule_delta = detail::to_list(k, v);
    } else if (k == "analysis.C") {
      c.C = positive(k, v);
    } else if (k == "analysis.c0") {
      c.c0 = positive(k, v);
    } else if (k == "analysis.alpha") {
      c.alpha = positive(k, v);
    } else if (k == "analysis.commutator_deltas") {
      c.commutator_deltas = detail::to_list(k, v);
    } else if (k == "input.rho") {
      c.input_rho = v;
    } else if (k == "input.u") {
      c.input_u = v;
    } else {
      throw ConfigError(k, "unknown key");
    }
  }

  for (const auto* key : {"schedule.eps", "schedule.delta"}) {
    const auto& list = std::string(key) == "schedule.eps" ? c.schedule_eps : c.schedule_delta;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!(list[i] > 0.0 && list[i] <= 1.0)) throw ConfigError(key, "values must lie in (0,1]");
      if (i > 0 && list[i] > list[i - 1]) throw ConfigError(key, "values must be nonincreasing");
    }
  }
  const int half = c.n / 2;
  for (const auto& m : c.forcing) {
    for (int d = 0; d < 3; ++d) {
      if (std::abs(m.k[d]) >= half) {
        throw ConfigError("forcing.modes", "mode outside the grid's resolved band |k_i| < n/2");
      }
    }
  }
  try {
    (void)c.kernels.eta.table(Grid(c.n));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kernels.eta", e.what());
  }
  try {
    (void)c.kernels.xi.table(Grid(c.n));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kernels.xi", e.what());
  }
  c.solver.continuation_schedule = c.schedule();
  return c;
}

inline RunConfig parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

inline RunConfig load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open '" + path + "'");
  return parse(is);
}

/// Forcing field sum_m amplitude_m * sin(2 pi k_m . x) (or cos).
inline VectorField build_forcing(Grid grid, const std::vector<ForcingMode>& modes) {
  std::array<std::vector<double>, 3> values;
  for (auto& v : values) v.assign(grid.size(), 0.0);
  const int n = grid.n();
  for (const auto& m : modes) {
    for (int kz = 0; kz < n; ++kz)
      for (int ky = 0; ky < n; ++ky)
        for (int kx = 0; kx < n; ++kx) {
          const double phase = spectral::two_pi * (m.k[0] * grid.coord(kx) + m.k[1] * grid.coord(ky) +
                                                   m.k[2] * grid.coord(kz));
          const double s = m.cosine ? std::cos(phase) : std::sin(phase);
          for (int c = 0; c < 3; ++c) values[c][grid.index(kx, ky, kz)] += m.amplitude[c] * s;
        }
  }
  // Every mode has k != 0, so the mean vanishes up to round-off; make it exact.
  auto component = [&](int c) {
    return spectral::project_mean_zero(ScalarField::from_nodal(grid, std::move(values[c])));
  };
  return {component(0), component(1), component(2)};
}

}  // namespace anisoflow::config
