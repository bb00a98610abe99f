#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "svelab/conditions.hpp"
#include "svelab/empirical.hpp"
#include "svelab/format.hpp"
#include "svelab/limitdist.hpp"
#include "svelab/mlf.hpp"
#include "svelab/simulator.hpp"
#include "svelab/spectral.hpp"
#include "svelab/volterra1d.hpp"

namespace svelab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

ConfigError::ConfigError(std::vector<std::string> issues)
    : ValidationError([&] {
        std::string s = "invalid config:";
        for (const auto& i : issues) s += "\n  - " + i;
        return s;
      }()),
      issues_(std::move(issues)) {}

namespace {

constexpr int kSchemaVersion = 1;

const std::vector<std::string> kKinds{"ml_tables", "simulate",   "converge",     "dichotomy",
                                      "conditions", "restart_check", "resolvent_solve"};

bool is_stochastic(const std::string& kind) {
  return kind == "simulate" || kind == "converge" || kind == "dichotomy" || kind == "restart_check";
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

json jnum(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json jnums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

// ---- strict config reading ----

class Issues {
 public:
  void add(std::string s) { list_.push_back(std::move(s)); }
  bool empty() const noexcept { return list_.empty(); }
  const std::vector<std::string>& list() const noexcept { return list_; }
  void raise_if_any() const {
    if (!list_.empty()) throw ConfigError(list_);
  }

 private:
  std::vector<std::string> list_;
};

/// One JSON object; every key must be consumed before finish().
class Block {
 public:
  Block(const json* j, std::string path, Issues& issues) : j_(j), path_(std::move(path)), issues_(&issues) {
    if (j_ && !j_->is_object()) {
      issues_->add(path_ + " must be an object");
      j_ = nullptr;
    }
  }

  const std::string& path() const noexcept { return path_; }
  bool present() const noexcept { return j_ != nullptr; }
  bool has(const std::string& key) const { return j_ && j_->contains(key); }
  void add_issue(const std::string& key, const std::string& what) { issues_->add(name(key) + " " + what); }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    const json* v = find(key, !def.has_value());
    if (!v) return def.value_or(std::nan(""));
    if (!v->is_number()) {
      add_issue(key, "must be a number");
      return std::nan("");
    }
    return v->get<double>();
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> def = std::nullopt) {
    const json* v = find(key, !def.has_value());
    if (!v) return def.value_or(0);
    if (!v->is_number_unsigned()) {
      add_issue(key, "must be a non-negative integer");
      return 0;
    }
    return v->get<std::size_t>();
  }

  std::optional<std::uint64_t> optional_u64(const std::string& key) {
    const json* v = find(key, false);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) {
      add_issue(key, "must be a non-negative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  bool flag(const std::string& key, bool def) {
    const json* v = find(key, false);
    if (!v) return def;
    if (!v->is_boolean()) {
      add_issue(key, "must be true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> def = std::nullopt) {
    const json* v = find(key, !def.has_value());
    if (!v) return def.value_or("");
    if (!v->is_string() || std::find(allowed.begin(), allowed.end(), v->get<std::string>()) == allowed.end()) {
      add_issue(key, "must be one of: " + join(allowed));
      return "";
    }
    return v->get<std::string>();
  }

  std::string text(const std::string& key, std::optional<std::string> def = std::nullopt) {
    const json* v = find(key, !def.has_value());
    if (!v) return def.value_or("");
    if (!v->is_string()) {
      add_issue(key, "must be a string");
      return "";
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) {
    const json* v = find(key, !def.has_value());
    if (!v) return def.value_or(std::vector<double>{});
    std::vector<double> out;
    if (!v->is_array() || v->empty()) {
      add_issue(key, "must be a non-empty array of numbers");
      return out;
    }
    for (const auto& e : *v) {
      if (!e.is_number()) {
        add_issue(key, "must contain numbers only");
        return {};
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  Block child(const std::string& key, bool required) {
    const json* v = find(key, required);
    return Block(v, name(key), *issues_);
  }

  void finish() const {
    if (!j_) return;
    for (const auto& [key, value] : j_->items())
      if (!used_.count(key)) issues_->add(name(key) + " is not a recognized field");
  }

 private:
  std::string name(const std::string& key) const { return path_ + "." + key; }

  const json* find(const std::string& key, bool required) {
    used_.insert({key, true});
    if (j_ && j_->contains(key)) return &j_->at(key);
    if (required) issues_->add(name(key) + " is required");
    return nullptr;
  }

  const json* j_;
  std::string path_;
  Issues* issues_;
  std::map<std::string, bool> used_;
};

// ---- problem pieces ----

struct OperatorSpec {
  spectral::DiagonalOperator op = spectral::DiagonalOperator::explicit_list({1.0});
  bool scalar = false;
  double A = -1.0;
  std::string description;
};

OperatorSpec parse_operator(Block b) {
  OperatorSpec s;
  const auto type = b.choice("type", {"scalar", "dirichlet_laplacian", "explicit"});
  if (type == "scalar") {
    s.scalar = true;
    s.A = b.number("A");
    if (!(s.A < 0.0)) b.add_issue("A", "must be negative");
    s.description = "scalar A=" + format_double(s.A);
  } else if (type == "dirichlet_laplacian") {
    const auto d = b.count("d"), cap = b.count("modes_per_axis");
    if (d < 1 || d > 3) b.add_issue("d", "must be 1, 2 or 3");
    if (cap < 1) b.add_issue("modes_per_axis", "must be positive");
    if (d >= 1 && d <= 3 && cap >= 1) {
      s.op = spectral::DiagonalOperator::dirichlet_laplacian(static_cast<int>(d), static_cast<int>(cap));
      s.description = "dirichlet_laplacian d=" + std::to_string(d) + " modes=" + std::to_string(s.op.size());
    }
  } else if (type == "explicit") {
    const auto mu = b.numbers("eigenvalues");
    if (!mu.empty()) {
      try {
        s.op = spectral::DiagonalOperator::explicit_list(mu);
        s.description = "explicit modes=" + std::to_string(mu.size());
      } catch (const std::exception& e) {
        b.add_issue("eigenvalues", std::string("rejected: ") + e.what());
      }
    }
  }
  b.finish();
  return s;
}

std::size_t operator_modes(const OperatorSpec& s) { return s.scalar ? 1 : s.op.size(); }

spectral::FractionalPair parse_kernels(Block b) {
  spectral::FractionalPair k{b.number("alpha"), b.number("beta")};
  if (!(k.alpha > 0.0 && k.alpha <= 2.0)) b.add_issue("alpha", "must lie in (0, 2]");
  if (!(k.beta > 0.5)) b.add_issue("beta", "must satisfy beta > 1/2 (square-integrable noise kernel)");
  b.finish();
  return k;
}

sim::Drift parse_drift(Block b) {
  if (!b.present()) return sim::Drift::zero();
  sim::Drift d;
  const auto type = b.choice("type", {"zero", "linear", "tanh", "sin"});
  if (type == "zero") {
    d = sim::Drift::zero();
  } else if (type == "linear") {
    d = sim::Drift::linear(b.number("slope"));
  } else if (type == "tanh" || type == "sin") {
    const double a = b.number("scale");
    const double c = std::abs(a);
    if (type == "tanh")
      d = sim::Drift::lipschitz([a](double u) { return a * std::tanh(u); }, "tanh scale=" + format_double(a), c, c, c);
    else
      d = sim::Drift::lipschitz([a](double u) { return a * std::sin(u); }, "sin scale=" + format_double(a), c, c, c);
  }
  b.finish();
  return d;
}

sim::Diffusion parse_diffusion(Block b) {
  if (!b.present()) return sim::Diffusion::additive({1.0});
  sim::Diffusion d;
  const auto type = b.choice("type", {"additive", "diagonal_linear", "pointwise"});
  if (type == "additive") {
    d = sim::Diffusion::additive(b.numbers("sigma", std::vector<double>{1.0}));
  } else if (type == "diagonal_linear") {
    const double s = b.number("scale"), c = b.number("offset", 0.0);
    d = sim::Diffusion::diagonal_multiplicative([s, c](std::size_t, double u) { return c + s * u; },
                                                "diagonal " + format_double(c) + " + " + format_double(s) + " u",
                                                std::abs(s), std::abs(c) + std::abs(s));
  } else if (type == "pointwise") {
    const auto fn = b.choice("function", {"identity", "sin", "tanh"});
    const double s = b.number("scale"), c = b.number("offset", 0.0);
    std::function<double(double)> f = [](double v) { return v; };
    if (fn == "sin") f = [](double v) { return std::sin(v); };
    if (fn == "tanh") f = [](double v) { return std::tanh(v); };
    d = sim::Diffusion::pointwise_multiplicative([f, s, c](double v) { return c + s * f(v); },
                                                 "pointwise " + format_double(c) + " + " + format_double(s) + " " + fn,
                                                 std::abs(s), std::abs(c) + std::abs(s));
  }
  b.finish();
  return d;
}

std::optional<spectral::ForcingSpec> parse_forcing(Block b, std::size_t modes) {
  const auto type = b.choice("type", {"power", "kernel_convolved"});
  const double gamma = type == "power" ? b.number("gamma") : 0.0;
  auto x = b.numbers("x");
  b.finish();
  if (x.size() == 1 && modes > 1) x.assign(modes, x.front());
  if (!x.empty() && x.size() != modes) {
    b.add_issue("x", "must have one entry or one per mode (" + std::to_string(modes) + ")");
    return std::nullopt;
  }
  if (type == "power" && !(gamma >= 0.0)) {
    b.add_issue("gamma", "must be non-negative");
    return std::nullopt;
  }
  if (x.empty() || type.empty()) return std::nullopt;
  return type == "power" ? spectral::ForcingSpec::power(gamma, x) : spectral::ForcingSpec::kernel_convolved(x);
}

struct ProblemSpec {
  OperatorSpec op;
  spectral::FractionalPair kernels;
  sim::Drift drift;
  sim::Diffusion diffusion;
  std::optional<spectral::ForcingSpec> forcing;
  std::optional<spectral::ForcingSpec> alternative;
  sim::Scheme scheme = sim::Scheme::euler_left;

  sim::SVEProblem build(double horizon, const spectral::ForcingSpec& f) const {
    auto p = op.scalar ? sim::SVEProblem::scalar_fractional(op.A, kernels.alpha, kernels.beta, f, horizon)
                       : sim::SVEProblem::spectral_fractional(op.op, kernels.alpha, kernels.beta, f, horizon);
    p.drift = drift;
    p.diffusion = diffusion;
    p.scheme = scheme;
    return p;
  }
};

ProblemSpec parse_problem(Block b, bool alternative) {
  ProblemSpec s;
  s.op = parse_operator(b.child("operator", true));
  s.kernels = parse_kernels(b.child("kernels", true));
  s.drift = parse_drift(b.child("drift", false));
  s.diffusion = parse_diffusion(b.child("diffusion", false));
  const auto m = operator_modes(s.op);
  s.forcing = parse_forcing(b.child("forcing", true), m);
  if (alternative) s.alternative = parse_forcing(b.child("alternative_forcing", true), m);
  const auto scheme = b.choice("scheme", {"euler_left", "exact_gaussian"}, std::string("euler_left"));
  s.scheme = scheme == "exact_gaussian" ? sim::Scheme::exact_gaussian : sim::Scheme::euler_left;
  b.finish();
  return s;
}

/// Runs the problem's own validation once the parse itself is clean.
void check_problem(const ProblemSpec& s, double horizon, Issues& issues) {
  if (!issues.empty() || !s.forcing) return;
  try {
    s.build(horizon, *s.forcing).validate();
  } catch (const std::exception& e) {
    issues.add(std::string("problem: ") + e.what());
  }
}

struct GridSpec {
  std::string type;
  double horizon = 0.0;
  std::size_t steps = 0;
  double grading = 1.0;
  double first_step = 0.0;

  TimeGrid build() const {
    if (type == "uniform") return TimeGrid::uniform(horizon, steps);
    if (type == "graded") return TimeGrid::graded(horizon, steps, grading);
    if (type == "geometric") return TimeGrid::geometric(horizon, steps, first_step);
    return sim::terminal_refined_grid(horizon, steps, first_step);
  }
};

GridSpec parse_grid(Block b, Issues& issues, std::optional<double> horizon = std::nullopt) {
  GridSpec g;
  g.type = b.choice("type", {"uniform", "graded", "geometric", "terminal_refined"});
  g.horizon = horizon ? *horizon : b.number("horizon");
  g.steps = b.count("steps");
  if (g.type == "graded") g.grading = b.number("grading");
  if (g.type == "geometric" || g.type == "terminal_refined") g.first_step = b.number("first_step");
  b.finish();
  if (!(g.horizon > 0.0)) b.add_issue("horizon", "must be positive");
  if (g.steps < 1) b.add_issue("steps", "must be positive");
  if (issues.empty()) {
    try {
      (void)g.build();
    } catch (const std::exception& e) {
      issues.add(b.path() + ": " + e.what());
    }
  }
  return g;
}

struct Common {
  std::string kind;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  fs::path out_dir = ".";
  std::string prefix;
};

// ---- kind plans ----

struct Plan {
  Common common;
  std::function<RunResult(const Common&)> execute;
};

std::string artifact(const Common& c, const std::string& suffix) {
  return (c.out_dir / (c.prefix + "_" + suffix)).string();
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

json report_header(const Common& c) {
  json r;
  r["kind"] = c.kind;
  r["schema_version"] = kSchemaVersion;
  if (is_stochastic(c.kind)) r["master_seed"] = c.seed;
  return r;
}

RunResult finish_run(const Common& c, json report, std::vector<std::string> files,
                     std::vector<std::pair<std::string, std::string>> summary) {
  RunResult res;
  res.kind = c.kind;
  const auto report_path = artifact(c, "report.json");
  files.push_back(report_path);
  json names = json::array();
  for (const auto& f : files) names.push_back(fs::path(f).filename().string());
  report["artifacts"] = names;
  write_json(report_path, report);
  res.artifacts = std::move(files);
  res.summary = std::move(summary);
  res.report = std::move(report);
  return res;
}

std::vector<double> checked_times(Block& b, const std::string& key, double horizon, std::vector<double> def = {}) {
  auto t = def.empty() ? b.numbers(key) : b.numbers(key, def);
  if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end())
    b.add_issue(key, "must be strictly increasing");
  for (double x : t)
    if (!(x >= 0.0 && x <= horizon * (1.0 + 1e-12))) {
      b.add_issue(key, "must lie in [0, " + format_double(horizon) + "]");
      break;
    }
  return t;
}

// ml_tables

Plan plan_ml_tables(Block numerics) {
  auto alphas = numerics.numbers("alphas");
  auto betas = numerics.numbers("betas");
  auto qs = numerics.numbers("q", std::vector<double>{1.0, 2.0});
  const double rel_tol = numerics.number("rel_tol", 1e-11);
  const double phase_tol = numerics.number("phase_tolerance", 1e-6);
  numerics.finish();
  for (double q : qs)
    if (!(q >= 1.0)) numerics.add_issue("q", "entries must be at least 1");
  for (double a : alphas)
    if (!(a > 0.0 && a <= 2.0)) numerics.add_issue("alphas", "entries must lie in (0, 2]");
  Plan p;
  p.execute = [=](const Common& c) {
    const auto table = artifact(c, "c_q.csv"), phase = artifact(c, "phase.csv");
    std::ofstream t(table), ph(phase);
    if (!t || !ph) throw std::ios_base::failure("cannot write ml_tables artifacts");
    t << "alpha,beta,q,c_q,abs_error,status\n";
    ph << "alpha,beta,time_domain,half_angle,full_angle,half_angle_rel_diff,full_angle_rel_diff\n";
    std::size_t entries = 0, outside = 0, checks = 0;
    double worst_half = 0.0, worst_full = 0.0;
    for (double a : alphas)
      for (double b : betas) {
        for (double q : qs) {
          ++entries;
          try {
            const auto v = mlf::c_q_detailed(a, b, q, rel_tol);
            t << format_double(a) << ',' << format_double(b) << ',' << format_double(q) << ','
              << format_double(v.value) << ',' << format_double(v.abs_error) << ",ok\n";
          } catch (const DomainError&) {
            ++outside;
            t << format_double(a) << ',' << format_double(b) << ',' << format_double(q) << ",inf,nan,divergent\n";
          }
        }
        if (b > 0.5 && b < a + 0.5) {
          const auto pc = mlf::plancherel_phase_check(a, b);
          ++checks;
          worst_half = std::max(worst_half, pc.half_angle_rel_diff);
          worst_full = std::max(worst_full, pc.full_angle_rel_diff);
          ph << format_double(a) << ',' << format_double(b) << ',' << format_double(pc.time_domain) << ','
             << format_double(pc.half_angle) << ',' << format_double(pc.full_angle) << ','
             << format_double(pc.half_angle_rel_diff) << ',' << format_double(pc.full_angle_rel_diff) << '\n';
        }
      }
    std::string verdict = "no_checks";
    if (checks > 0) {
      const bool half = worst_half <= phase_tol, full = worst_full <= phase_tol;
      verdict = half && !full ? "cos(alpha pi/2)" : full && !half ? "cos(alpha pi)" : half ? "both" : "neither";
    }
    auto r = report_header(c);
    r["entries"] = entries;
    r["outside_window"] = outside;
    r["phase_checks"] = checks;
    r["max_rel_diff_half_angle"] = jnum(worst_half);
    r["max_rel_diff_full_angle"] = jnum(worst_full);
    r["phase_verdict"] = verdict;
    return finish_run(c, r, {table, phase},
                      {{"entries", std::to_string(entries)},
                       {"divergent entries", std::to_string(outside)},
                       {"phase verdict", verdict},
                       {"max rel diff cos(alpha pi/2)", format_double(worst_half)}});
  };
  return p;
}

// resolvent_solve

struct KernelSpec {
  std::optional<Kernel> kernel;
  std::optional<double> fractional_exponent;
  std::string description;
};

KernelSpec parse_kernel(Block b) {
  KernelSpec s;
  const auto type = b.choice("type", {"fractional", "log1p_inverse", "exponential_mixture", "tabulated_csv"});
  try {
    if (type == "fractional") {
      const double a = b.number("alpha");
      if (a > 0.0) {
        s.kernel = Kernel::fractional(a);
        s.fractional_exponent = a;
      } else {
        b.add_issue("alpha", "must be positive");
      }
      s.description = "fractional alpha=" + format_double(a);
    } else if (type == "log1p_inverse") {
      const double d = b.number("delta", 0.5);
      s.kernel = Kernel::log1p_inverse(d);
      s.description = "log1p_inverse";
    } else if (type == "exponential_mixture") {
      const auto w = b.numbers("weights"), r = b.numbers("rates");
      if (w.size() != r.size()) {
        b.add_issue("rates", "must have as many entries as weights");
      } else if (!w.empty()) {
        std::vector<ExpTerm> terms;
        for (std::size_t i = 0; i < w.size(); ++i) terms.push_back({w[i], r[i]});
        s.kernel = Kernel::exponential_mixture(terms);
      }
      s.description = "exponential_mixture terms=" + std::to_string(w.size());
    } else if (type == "tabulated_csv") {
      const auto path = b.text("path");
      const double d = b.number("delta");
      if (!path.empty()) s.kernel = Kernel::load_csv(path, d);
      s.description = "tabulated " + path;
    }
  } catch (const std::exception& e) {
    b.add_issue("type", std::string("kernel rejected: ") + e.what());
  }
  b.finish();
  return s;
}

Plan plan_resolvent(Block problem, Block numerics, Issues& issues) {
  const auto k = parse_kernel(problem.child("kernel", true));
  const auto rho = problem.has("rho") ? parse_kernel(problem.child("rho", false)) : k;
  const double mu = problem.number("mu");
  problem.finish();
  if (!(mu >= 0.0)) problem.add_issue("mu", "must be non-negative");
  const auto grid = parse_grid(numerics.child("grid", true), issues);
  const auto tail = numerics.choice("tail_model", {"default", "none", "power", "inverse_log_square"},
                                    std::string("default"));
  numerics.finish();
  Plan p;
  p.execute = [=](const Common& c) {
    const auto g = grid.build();
    const auto sol = volterra::solve_e_rho(*k.kernel, *rho.kernel, mu, g);
    auto model = volterra::default_tail_model(*k.kernel);
    if (tail == "none") model = volterra::TailModel::none;
    if (tail == "power") model = volterra::TailModel::power;
    if (tail == "inverse_log_square") model = volterra::TailModel::inverse_log_square;
    std::optional<double> exponent;
    if (model == volterra::TailModel::power && k.fractional_exponent && *k.fractional_exponent < 1.0 &&
        rho.fractional_exponent)
      exponent = rho.fractional_exponent.value() - 1.0 - 2.0 * *k.fractional_exponent;
    const auto mass = volterra::solution_mass(sol, model, exponent);
    const double residual = volterra::discrete_residual(*k.kernel, *rho.kernel, mu, sol);
    const bool closed = k.fractional_exponent && rho.fractional_exponent;
    const auto csv = artifact(c, "solution.csv");
    std::ofstream out(csv);
    if (!out) throw std::ios_base::failure("cannot open " + csv + " for writing");
    out << "t,e,closed_form\n";
    double sup = closed ? 0.0 : std::nan("");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = sol.values.value(i);
      double ref = std::nan("");
      if (closed && i > 0) {
        ref = mlf::e_h_closed(g[i], mu, *k.fractional_exponent, *rho.fractional_exponent);
        sup = std::max(sup, std::abs(v - ref));
      }
      out << format_double(g[i]) << ',' << format_double(v) << ',' << format_double(ref) << '\n';
    }
    auto r = report_header(c);
    r["kernel"] = k.description;
    r["rho"] = rho.description;
    r["mu"] = jnum(mu);
    r["steps"] = g.steps();
    r["grid_mass"] = jnum(mass.grid_mass);
    r["tail"] = jnum(mass.tail);
    r["total_mass"] = jnum(mass.total);
    r["residual"] = jnum(residual);
    r["sup_error"] = jnum(sup);
    return finish_run(c, r, {csv},
                      {{"grid mass", format_double(mass.grid_mass)},
                       {"total mass", format_double(mass.total)},
                       {"residual", format_double(residual)},
                       {"sup error vs closed form", format_double(sup)}});
  };
  return p;
}

// conditions

Plan plan_conditions(Block problem, Issues&) {
  const auto op = parse_operator(problem.child("operator", true));
  const auto kernels = parse_kernels(problem.child("kernels", true));
  Block cb = problem.child("constants", true);
  conditions::CoefficientConstants consts;
  consts.C_F_lip = cb.number("C_F_lip", 0.0);
  consts.C_F_lin = cb.number("C_F_lin", 0.0);
  consts.C_sigma_lip = cb.number("C_sigma_lip", 0.0);
  consts.C_sigma_lin = cb.number("C_sigma_lin", 0.0);
  cb.finish();
  try {
    consts.validate();
  } catch (const std::exception& e) {
    cb.add_issue("C_F_lip", std::string("constants rejected: ") + e.what());
  }
  const double delta = problem.number("delta", 0.0);
  const std::optional<double> gamma = problem.has("gamma") ? std::optional(problem.number("gamma")) : std::nullopt;
  problem.finish();
  if (!(delta >= 0.0)) problem.add_issue("delta", "must be non-negative");
  if (gamma && !(*gamma >= 0.0 && *gamma <= kernels.alpha)) problem.add_issue("gamma", "must lie in [0, alpha]");
  if (gamma && !op.op.is_dirichlet()) problem.add_issue("gamma", "region checks need a dirichlet_laplacian operator");
  Plan p;
  p.execute = [=](const Common& c) {
    std::vector<conditions::ConditionReport> reports;
    if (op.scalar) {
      const auto one = conditions::check_1d_theorem(op.A, kernels.alpha, kernels.beta, consts);
      reports.push_back(one.a);
      reports.push_back(one.b);
    } else {
      reports.push_back(
          conditions::check_general_limit(op.op, kernels, consts, delta, conditions::Variant::limit));
      reports.push_back(
          conditions::check_general_limit(op.op, kernels, consts, delta, conditions::Variant::stability));
      if (consts.C_sigma_lip == 0.0 && consts.C_sigma_lin == 0.0)
        reports.push_back(conditions::check_additive(op.op, kernels.alpha, consts.C_F_lin, delta));
      if (gamma)
        reports.push_back(conditions::check_heat_region(op.op.dimension(), kernels.alpha, kernels.beta, delta, *gamma,
                                                        consts.C_sigma_lip > 0.0));
    }
    const auto path = artifact(c, "conditions.json");
    {
      std::ofstream out(path);
      if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
      out << conditions::to_json(reports) << '\n';
    }
    auto r = report_header(c);
    r["reports"] = json::parse(conditions::to_json(reports));
    std::vector<std::pair<std::string, std::string>> summary;
    for (const auto& rep : reports)
      summary.push_back({rep.name, std::string(to_string(rep.verdict)) + " (lhs " + format_double(rep.lhs) + ")"});
    return finish_run(c, r, {path}, summary);
  };
  return p;
}

// simulate

Plan plan_simulate(Block problem, Block numerics, Issues& issues, std::size_t& n_paths_out) {
  const auto spec = parse_problem(problem, false);
  const auto grid = parse_grid(numerics.child("grid", true), issues);
  const std::size_t n_paths = numerics.count("n_paths");
  const auto record = checked_times(numerics, "record_times", grid.horizon, {grid.horizon});
  numerics.finish();
  if (n_paths < 1) numerics.add_issue("n_paths", "must be positive");
  check_problem(spec, grid.horizon, issues);
  if (issues.empty()) {
    try {
      const auto g = grid.build();
      for (double t : record) (void)g.index_of(t);
    } catch (const std::exception& e) {
      numerics.add_issue("record_times", std::string("must be grid nodes: ") + e.what());
    }
  }
  n_paths_out = n_paths;
  Plan p;
  p.execute = [=](const Common& c) {
    const auto g = grid.build();
    const auto problem_ = spec.build(grid.horizon, *spec.forcing);
    const auto laws = sim::run_ensemble(problem_, g, n_paths, record, c.seed, c.workers);
    const auto samples = artifact(c, "samples.csv"), moments = artifact(c, "moments.csv");
    write_samples_csv(samples, laws);
    write_moments_csv(moments, laws);
    auto r = report_header(c);
    r["n_paths"] = n_paths;
    r["modes"] = problem_.modes();
    r["record_times"] = jnums(record);
    r["scheme"] = spec.scheme == sim::Scheme::exact_gaussian ? "exact_gaussian" : "euler_left";
    std::vector<std::pair<std::string, std::string>> summary{{"paths", std::to_string(n_paths)}};
    for (const auto& law : laws)
      summary.push_back({"t=" + format_double(law.time()),
                         "mean[0] " + format_double(law.mean(0)) + "  var[0] " + format_double(law.variance(0))});
    return finish_run(c, r, {samples, moments}, summary);
  };
  return p;
}

// converge

limitdist::GaussianLaw stationary_gaussian(const sim::SVEProblem& p) {
  const double a = p.fractional->alpha, b = p.fractional->beta;
  const double shift = p.drift.kind == sim::Drift::Kind::linear ? p.drift.slope : 0.0;
  std::vector<double> mu;
  for (std::size_t n = 0; n < p.modes(); ++n) mu.push_back(p.op[n] - shift);
  const auto op = spectral::DiagonalOperator::explicit_list(mu);
  limitdist::GaussianLaw law;
  law.mean = spectral::Gg_limit(op, p.forcing, a, Kernel::fractional(a));
  for (std::size_t n = 0; n < mu.size(); ++n) {
    const double s = p.diffusion.sigma0.size() == 1 ? p.diffusion.sigma0[0] : p.diffusion.sigma0[n];
    law.sd.push_back(std::abs(s) * std::sqrt(mlf::lq_norm_e_h(mu[n], a, b, 2.0)));
  }
  return law;
}

Plan plan_converge(Block problem, Block numerics, Issues& issues, std::size_t& n_paths_out) {
  const auto spec = parse_problem(problem, false);
  limitdist::ConvergenceOptions o;
  o.times = numerics.numbers("times");
  o.n_paths = numerics.count("n_paths");
  o.p = numerics.number("p", 2.0);
  o.reference_factor = numerics.number("reference_factor", 4.0);
  o.bootstrap = numerics.count("bootstrap", 200);
  o.null_reps = numerics.count("null_reps", 200);
  o.noise_quantile = numerics.number("noise_quantile", 0.99);
  o.step = numerics.number("step", 0.01);
  const auto oracle = numerics.choice("oracle", {"none", "stationary_gaussian"}, std::string("none"));
  const bool envelope = numerics.flag("rate_envelope", false);
  numerics.finish();
  if (o.times.empty() || !std::is_sorted(o.times.begin(), o.times.end()))
    numerics.add_issue("times", "must be increasing");
  if (o.n_paths < 2) numerics.add_issue("n_paths", "must be at least 2");
  if (o.bootstrap < 2) numerics.add_issue("bootstrap", "must be at least 2");
  if (o.null_reps < 1) numerics.add_issue("null_reps", "must be positive");
  if (!(o.noise_quantile > 0.0 && o.noise_quantile < 1.0)) numerics.add_issue("noise_quantile", "must lie in (0, 1)");
  if (!(o.p >= 1.0)) numerics.add_issue("p", "must be at least 1");
  if (!(o.step > 0.0)) numerics.add_issue("step", "must be positive");
  if (oracle == "stationary_gaussian") {
    if (o.p != 2.0) numerics.add_issue("oracle", "needs p = 2");
    if (spec.drift.kind == sim::Drift::Kind::lipschitz || spec.diffusion.kind != sim::Diffusion::Kind::additive)
      numerics.add_issue("oracle", "needs a zero or linear drift and additive noise");
    if (!(spec.kernels.beta < spec.kernels.alpha + 0.5))
      numerics.add_issue("oracle", "needs beta < alpha + 1/2 for a finite stationary variance");
  } else if (!(o.reference_factor > 1.0)) {
    numerics.add_issue("reference_factor", "must exceed 1");
  }
  if (envelope && !spec.op.scalar) numerics.add_issue("rate_envelope", "is available for scalar problems only");
  for (double t : o.times)
    if (std::abs(t / o.step - std::round(t / o.step)) > 1e-9 * std::max(1.0, t / o.step)) {
      numerics.add_issue("times", "must be multiples of step");
      break;
    }
  const double horizon = o.times.empty() ? 1.0 : o.times.back() * (oracle == "none" ? o.reference_factor : 1.0);
  check_problem(spec, horizon, issues);
  n_paths_out = o.n_paths;
  Plan p;
  p.execute = [=](const Common& c) mutable {
    o.seed = c.seed;
    o.workers = c.workers;
    const auto prob = spec.build(horizon, *spec.forcing);
    if (oracle == "stationary_gaussian") o.oracle = stationary_gaussian(prob);
    if (envelope) {
      const double a = spec.kernels.alpha;
      const auto g = TimeGrid::uniform(horizon, static_cast<std::size_t>(std::llround(horizon / o.step)));
      const auto Gg = spectral::compute_Gg(prob.op, prob.forcing, a, g).modes.front();
      const double lim = spectral::Gg_limit(prob.op, prob.forcing, a, Kernel::fractional(a)).front();
      std::vector<double> sup(g.size());
      double run = 0.0;
      for (std::size_t i = g.size(); i-- > 0;) sup[i] = run = std::max(run, std::abs(Gg.value(i) - lim));
      const GridFunction decay(g, std::move(sup), Interpolation::constant_left);
      o.rate = limitdist::scalar_rate_inputs(spec.op.A, a, spec.kernels.beta, prob.drift.C_F_lip, 0.0,
                                             prob.diffusion.sigma0.front(), [decay](double t) { return decay(t); });
    }
    const auto res = limitdist::convergence_experiment(prob, o);
    const auto csv = artifact(c, "convergence.csv");
    res.write_csv(csv);
    auto r = report_header(c);
    r["n_paths"] = o.n_paths;
    r["used_oracle"] = res.used_oracle;
    r["reference_time"] = jnum(res.reference_time);
    r["noise_floor"] = jnum(res.noise_floor);
    r["decreasing_within_noise"] = res.decreasing_within_noise();
    r["final_below_floor"] = res.points.back().w < res.noise_floor;
    r["warnings"] = res.warnings;
    json pts = json::array();
    for (const auto& pt : res.points)
      pts.push_back({{"t", jnum(pt.t)}, {"w", jnum(pt.w)}, {"stderr", jnum(pt.stderr_w)},
                     {"bound_envelope", jnum(pt.bound_envelope)}});
    r["points"] = pts;
    std::vector<std::pair<std::string, std::string>> summary{{"noise floor", format_double(res.noise_floor)}};
    for (const auto& pt : res.points)
      summary.push_back({"t=" + format_double(pt.t), "W " + format_double(pt.w) + " +- " + format_double(pt.stderr_w)});
    for (const auto& w : res.warnings) summary.push_back({"warning", w});
    return finish_run(c, r, {csv}, summary);
  };
  return p;
}

// dichotomy

Plan plan_dichotomy(Block problem, Block numerics, Issues& issues, std::size_t& n_paths_out) {
  const auto spec = parse_problem(problem, true);
  const auto grid = parse_grid(numerics.child("grid", true), issues);
  limitdist::DependenceOptions o;
  o.n_paths = numerics.count("n_paths");
  o.null_reps = numerics.count("null_reps", 200);
  o.noise_quantile = numerics.number("noise_quantile", 0.99);
  o.min_paths = numerics.count("min_paths", 200);
  numerics.finish();
  if (o.n_paths < 2) numerics.add_issue("n_paths", "must be at least 2");
  if (!(o.noise_quantile > 0.0 && o.noise_quantile < 1.0)) numerics.add_issue("noise_quantile", "must lie in (0, 1)");
  check_problem(spec, grid.horizon, issues);
  n_paths_out = o.n_paths;
  Plan p;
  p.execute = [=](const Common& c) mutable {
    o.seed = c.seed;
    o.workers = c.workers;
    const auto prob = spec.build(grid.horizon, *spec.forcing);
    const auto rep = limitdist::initial_dependence_experiment(prob, *spec.forcing, *spec.alternative, grid.build(), o);
    auto r = report_header(c);
    r["n_paths"] = o.n_paths;
    r["horizon"] = jnum(rep.horizon);
    r["w"] = jnum(rep.w);
    r["noise_floor"] = jnum(rep.noise_floor);
    r["mean_diff"] = jnums(rep.mean_diff);
    r["mean_diff_stderr"] = jnums(rep.mean_diff_stderr);
    r["predicted_mean_diff"] = jnums(rep.predicted_mean_diff.value_or(std::vector<double>{}));
    r["verdict"] = limitdist::to_string(rep.verdict);
    r["diagnostic"] = rep.diagnostic;
    return finish_run(c, r, {},
                      {{"W between late laws", format_double(rep.w)},
                       {"noise floor", format_double(rep.noise_floor)},
                       {"mean difference[0]", format_double(rep.mean_diff.front()) + " +- " +
                                                  format_double(rep.mean_diff_stderr.front())},
                       {"verdict", limitdist::to_string(rep.verdict)}});
  };
  return p;
}

// restart_check

Plan plan_restart(Block problem, Block numerics, Issues& issues, std::size_t& n_paths_out) {
  const auto spec = parse_problem(problem, false);
  const double tau = numerics.number("tau"), t = numerics.number("t");
  if (!(tau > 0.0)) numerics.add_issue("tau", "must be positive");
  if (!(t > 0.0)) numerics.add_issue("t", "must be positive");
  const auto grid = parse_grid(numerics.child("grid", true), issues, tau + t);
  const std::size_t n_paths = numerics.count("n_paths");
  numerics.finish();
  if (n_paths < 2) numerics.add_issue("n_paths", "must be at least 2");
  check_problem(spec, tau + t, issues);
  if (issues.empty()) {
    try {
      (void)grid.build().index_of(tau);
    } catch (const std::exception&) {
      numerics.add_issue("tau", "must be a node of the grid");
    }
  }
  n_paths_out = n_paths;
  Plan p;
  p.execute = [=](const Common& c) {
    const auto g = grid.build();
    const auto prob = spec.build(tau + t, *spec.forcing);
    const auto direct = sim::run_ensemble(prob, g, n_paths, {tau + t}, c.seed, c.workers).front();
    const auto restarted =
        sim::run_restart_ensemble(prob, g, tau, n_paths, {t}, c.seed ^ 0x9e3779b97f4a7c15ULL, c.workers).front();
    double ks = 0.0;
    for (std::size_t n = 0; n < direct.dimension(); ++n)
      ks = std::max(ks, ks_statistic(direct.mode(n), restarted.mode(n)));
    const double crit = ks_critical_5pct(n_paths, n_paths);
    const auto samples = artifact(c, "samples.csv");
    write_samples_csv(samples, {direct, restarted});
    auto r = report_header(c);
    r["n_paths"] = n_paths;
    r["tau"] = jnum(tau);
    r["t"] = jnum(t);
    r["ks_statistic"] = jnum(ks);
    r["ks_critical"] = jnum(crit);
    r["pass"] = ks < crit;
    return finish_run(c, r, {samples},
                      {{"KS statistic", format_double(ks)},
                       {"5% critical value", format_double(crit)},
                       {"laws agree", ks < crit ? "yes" : "no"}});
  };
  return p;
}

Plan make_plan(const json& config, const Overrides& ov) {
  Issues issues;
  Block root(&config, "config", issues);
  const auto kind = root.choice("kind", kKinds);
  issues.raise_if_any();
  Common c;
  c.kind = kind;
  Block problem = root.child("problem", kind != "ml_tables");
  Block numerics = root.child("numerics", kind != "conditions");
  Block output = root.child("output", false);
  root.finish();
  if (kind == "ml_tables" && problem.present()) issues.add("config.problem is not used by ml_tables");
  if (kind == "conditions" && numerics.present()) issues.add("config.numerics is not used by conditions");

  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  if (kind != "conditions") {
    seed = numerics.optional_u64("master_seed");
    workers = static_cast<unsigned>(numerics.count("workers", 1));
  }
  c.out_dir = output.text("dir", std::string("."));
  c.prefix = output.text("prefix", kind);
  output.finish();
  if (ov.seed) seed = ov.seed;
  if (ov.workers) workers = *ov.workers;
  if (ov.out_dir) c.out_dir = *ov.out_dir;
  if (is_stochastic(kind) && !seed)
    issues.add("config.numerics.master_seed is required for stochastic experiments (or pass --seed)");
  c.seed = seed.value_or(0);
  c.workers = workers;
  if (c.prefix.empty() || c.prefix.find('/') != std::string::npos)
    issues.add("config.output.prefix must be a non-empty file name stem");

  std::size_t n_paths = 0;
  Plan p;
  if (kind == "ml_tables") p = plan_ml_tables(numerics);
  if (kind == "resolvent_solve") p = plan_resolvent(problem, numerics, issues);
  if (kind == "conditions") p = plan_conditions(problem, issues);
  if (kind == "simulate") p = plan_simulate(problem, numerics, issues, n_paths);
  if (kind == "converge") p = plan_converge(problem, numerics, issues, n_paths);
  if (kind == "dichotomy") p = plan_dichotomy(problem, numerics, issues, n_paths);
  if (kind == "restart_check") p = plan_restart(problem, numerics, issues, n_paths);
  issues.raise_if_any();
  p.common = c;
  return p;
}

// ---- report schemas ----

enum class JType { number, integer, string, boolean, array, object };

using Schema = std::vector<std::pair<std::string, JType>>;

const std::map<std::string, Schema>& schemas() {
  using enum JType;
  static const std::map<std::string, Schema> s{
      {"ml_tables",
       {{"entries", integer}, {"outside_window", integer}, {"phase_checks", integer},
        {"max_rel_diff_half_angle", number}, {"max_rel_diff_full_angle", number}, {"phase_verdict", string}}},
      {"resolvent_solve",
       {{"kernel", string}, {"rho", string}, {"mu", number}, {"steps", integer}, {"grid_mass", number},
        {"tail", number}, {"total_mass", number}, {"residual", number}, {"sup_error", number}}},
      {"conditions", {{"reports", array}}},
      {"simulate",
       {{"master_seed", integer}, {"n_paths", integer}, {"modes", integer}, {"record_times", array},
        {"scheme", string}}},
      {"converge",
       {{"master_seed", integer}, {"n_paths", integer}, {"used_oracle", boolean}, {"reference_time", number},
        {"noise_floor", number}, {"decreasing_within_noise", boolean}, {"final_below_floor", boolean},
        {"warnings", array}, {"points", array}}},
      {"dichotomy",
       {{"master_seed", integer}, {"n_paths", integer}, {"horizon", number}, {"w", number}, {"noise_floor", number},
        {"mean_diff", array}, {"mean_diff_stderr", array}, {"predicted_mean_diff", array}, {"verdict", string},
        {"diagnostic", string}}},
      {"restart_check",
       {{"master_seed", integer}, {"n_paths", integer}, {"tau", number}, {"t", number}, {"ks_statistic", number},
        {"ks_critical", number}, {"pass", boolean}}},
  };
  return s;
}

bool matches(const json& v, JType t) {
  switch (t) {
    case JType::number:
      return v.is_number() || (v.is_string() && (v == "inf" || v == "-inf" || v == "nan"));
    case JType::integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    case JType::string: return v.is_string();
    case JType::boolean: return v.is_boolean();
    case JType::array: return v.is_array();
    case JType::object: return v.is_object();
  }
  return false;
}

const char* type_name(JType t) {
  switch (t) {
    case JType::number: return "number";
    case JType::integer: return "integer";
    case JType::string: return "string";
    case JType::boolean: return "boolean";
    case JType::array: return "array";
    case JType::object: return "object";
  }
  return "?";
}

// ---- describe ----

const std::map<std::string, std::pair<std::string, std::string>>& docs() {
  static const std::map<std::string, std::pair<std::string, std::string>> d{
      {"ml_tables",
       {R"(ml_tables: tables of c_q(alpha, beta) = int_0^inf |t^(beta-1) E_{alpha,beta}(-t^alpha)|^q dt
  and the time/frequency phase comparison for q = 2.
numerics:
  alphas            [number]  kernel exponents in (0, 2]                  (required)
  betas             [number]                                              (required)
  q                 [number]  exponents >= 1                              (default [1, 2])
  rel_tol           number    quadrature tolerance                        (default 1e-11)
  phase_tolerance   number    relative agreement for the phase verdict    (default 1e-6)
  workers           integer   accepted, unused                            (default 1)
  master_seed       integer   accepted, unused
output: dir (default "."), prefix (default kind)
artifacts: <prefix>_c_q.csv, <prefix>_phase.csv, <prefix>_report.json)",
        R"({"kind": "ml_tables", "numerics": {"alphas": [0.5, 1.0], "betas": [0.75, 1.0], "q": [1, 2]}})"}},
      {"resolvent_solve",
       {R"(resolvent_solve: solves e + mu k * e = rho on a grid and reports its mass.
problem:
  kernel   object  {"type": "fractional", "alpha"} | {"type": "log1p_inverse", "delta"}
                   | {"type": "exponential_mixture", "weights", "rates"} | {"type": "tabulated_csv", "path", "delta"}
  rho      object  same forms as kernel                                 (default: kernel)
  mu       number  >= 0                                                 (required)
numerics:
  grid        object  {"type": uniform|graded|geometric|terminal_refined, "horizon", "steps",
                       "grading" (graded), "first_step" (geometric, terminal_refined)}
  tail_model  string  default|none|power|inverse_log_square             (default "default")
  workers, master_seed accepted, unused
artifacts: <prefix>_solution.csv (t, e, closed_form), <prefix>_report.json)",
        R"({"kind": "resolvent_solve", "problem": {"kernel": {"type": "fractional", "alpha": 0.5}, "mu": 1.0},
 "numerics": {"grid": {"type": "graded", "horizon": 5.0, "steps": 256, "grading": 0.5}}})"}},
      {"conditions",
       {R"(conditions: dissipativity and region checks with propagated numerical error bands.
problem:
  operator   object  {"type": "scalar", "A" < 0} | {"type": "dirichlet_laplacian", "d", "modes_per_axis"}
                     | {"type": "explicit", "eigenvalues"}
  kernels    object  {"alpha" in (0, 2], "beta" > 1/2}
  constants  object  C_F_lip, C_F_lin, C_sigma_lip, C_sigma_lin (default 0)
  delta      number  smoothing index of V = H^delta                      (default 0)
  gamma      number  forcing index in [0, alpha]; adds the heat region check (dirichlet only)
artifacts: <prefix>_conditions.json, <prefix>_report.json)",
        R"({"kind": "conditions", "problem": {"operator": {"type": "dirichlet_laplacian", "d": 1, "modes_per_axis": 64},
 "kernels": {"alpha": 1.0, "beta": 1.0}, "constants": {"C_F_lin": 0.5, "C_F_lip": 0.5}, "gamma": 0.5}})"}},
      {"simulate",
       {R"(simulate: Monte Carlo ensemble of the truncated equation
  u(t) = Gg(t) + int E_k(t-s) F(u(s)) ds + int E_h(t-s) sigma(u(s)) dW(s).
problem:
  operator     object  as in conditions
  kernels      object  {"alpha", "beta"}
  drift        object  {"type": zero} | {"type": linear, "slope"} | {"type": tanh|sin, "scale"}   (default zero)
  diffusion    object  {"type": additive, "sigma": [..]} | {"type": diagonal_linear, "scale", "offset"}
                       | {"type": pointwise, "function": identity|sin|tanh, "scale", "offset"}  (default additive [1])
  forcing      object  {"type": power, "gamma", "x": [..]} | {"type": kernel_convolved, "x": [..]}
  scheme       string  euler_left | exact_gaussian                      (default euler_left)
numerics:
  grid          object   as in resolvent_solve
  n_paths       integer                                                 (required)
  record_times  [number] grid nodes                                     (default [horizon])
  master_seed   integer  required (or --seed)
  workers       integer  results do not depend on it                    (default 1)
artifacts: <prefix>_samples.csv, <prefix>_moments.csv, <prefix>_report.json)",
        R"({"kind": "simulate", "problem": {"operator": {"type": "scalar", "A": -1.0}, "kernels": {"alpha": 0.75, "beta": 1.0},
 "diffusion": {"type": "additive", "sigma": [1.0]}, "forcing": {"type": "power", "gamma": 0.0, "x": [1.0]}},
 "numerics": {"grid": {"type": "uniform", "horizon": 2.0, "steps": 100}, "n_paths": 200,
 "record_times": [1.0, 2.0], "master_seed": 7}})"}},
      {"converge",
       {R"(converge: empirical Wasserstein distance between the law at t and the limit law.
problem: as in simulate
numerics:
  times             [number]  increasing, multiples of step              (required)
  n_paths           integer                                              (required)
  step              number    uniform grid step                          (default 0.01)
  p                 number    >= 1                                       (default 2)
  oracle            string    none | stationary_gaussian                 (default none: late-time proxy)
  reference_factor  number    proxy time / max(times)                    (default 4)
  bootstrap         integer   resamples for the standard errors          (default 200)
  null_reps         integer   replicates for the noise floor             (default 200)
  noise_quantile    number    null quantile used as the floor            (default 0.99)
  rate_envelope     boolean   fit the decay envelope (scalar problems)   (default false)
  master_seed, workers as in simulate
artifacts: <prefix>_convergence.csv (t, W_hat, stderr, bound_envelope), <prefix>_report.json)",
        R"({"kind": "converge", "problem": {"operator": {"type": "scalar", "A": -1.0}, "kernels": {"alpha": 1.0, "beta": 1.0},
 "forcing": {"type": "power", "gamma": 0.0, "x": [3.0]}},
 "numerics": {"times": [1.0, 2.0, 4.0], "n_paths": 400, "step": 0.02, "oracle": "stationary_gaussian",
 "bootstrap": 20, "null_reps": 40, "rate_envelope": true, "master_seed": 1}})"}},
      {"dichotomy",
       {R"(dichotomy: compares the late-time laws for two forcings.
problem: as in simulate, plus
  alternative_forcing  object  second forcing, same form as forcing     (required)
numerics:
  grid            object   as in resolvent_solve; its horizon is the comparison time
  n_paths         integer                                               (required)
  null_reps       integer                                               (default 200)
  noise_quantile  number                                                (default 0.99)
  min_paths       integer  fewer paths give an inconclusive verdict     (default 200)
  master_seed, workers as in simulate
artifacts: <prefix>_report.json (verdict same_limit | different_limit | inconclusive))",
        R"({"kind": "dichotomy", "problem": {"operator": {"type": "scalar", "A": -1.0}, "kernels": {"alpha": 0.8, "beta": 1.0},
 "forcing": {"type": "power", "gamma": 0.8, "x": [0.0]}, "alternative_forcing": {"type": "power", "gamma": 0.8, "x": [2.0]}},
 "numerics": {"grid": {"type": "terminal_refined", "horizon": 200.0, "steps": 400, "first_step": 0.01},
 "n_paths": 400, "null_reps": 40, "master_seed": 3}})"}},
      {"restart_check",
       {R"(restart_check: law of u(t + tau) against paths restarted at tau with fresh noise.
problem: as in simulate
numerics:
  tau          number   restart time, a grid node                        (required)
  t            number   comparison time after the restart                (required)
  grid         object   as in resolvent_solve without horizon (it is tau + t)
  n_paths      integer                                                   (required)
  master_seed, workers as in simulate
artifacts: <prefix>_samples.csv, <prefix>_report.json (two-sample KS at 5%))",
        R"({"kind": "restart_check", "problem": {"operator": {"type": "scalar", "A": -1.0}, "kernels": {"alpha": 0.75, "beta": 1.0},
 "forcing": {"type": "power", "gamma": 0.0, "x": [1.0]}},
 "numerics": {"tau": 1.0, "t": 1.0, "grid": {"type": "uniform", "steps": 100}, "n_paths": 300, "master_seed": 5}})"}},
  };
  return d;
}

const std::pair<std::string, std::string>& doc_for(const std::string& kind) {
  const auto it = docs().find(kind);
  if (it == docs().end())
    throw ConfigError({"unknown experiment kind '" + kind + "'; valid kinds: " + join(kKinds)});
  return it->second;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() { return kKinds; }

std::string describe(const std::string& kind) {
  const auto& d = doc_for(kind);
  return d.first + "\nexample:\n" + d.second + "\n";
}

std::string example_config(const std::string& kind) { return doc_for(kind).second; }

void validate_config(const json& config, const Overrides& overrides) { (void)make_plan(config, overrides); }

RunResult run(const json& config, const Overrides& overrides) {
  const auto plan = make_plan(config, overrides);
  fs::create_directories(plan.common.out_dir);
  return plan.execute(plan.common);
}

RunResult run_file(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config " + path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return run(config, overrides);
}

std::vector<std::string> check_report(const json& report) {
  std::vector<std::string> bad;
  if (!report.is_object()) return {"report is not an object"};
  if (!report.contains("kind") || !report["kind"].is_string()) return {"kind missing"};
  const auto kind = report["kind"].get<std::string>();
  const auto it = schemas().find(kind);
  if (it == schemas().end()) return {"unknown kind " + kind};
  Schema s = it->second;
  s.push_back({"kind", JType::string});
  s.push_back({"schema_version", JType::integer});
  s.push_back({"artifacts", JType::array});
  std::map<std::string, bool> known;
  for (const auto& [key, type] : s) {
    known[key] = true;
    if (!report.contains(key))
      bad.push_back(key + " missing");
    else if (!matches(report[key], type))
      bad.push_back(key + " is not of type " + type_name(type));
  }
  for (const auto& [key, value] : report.items())
    if (!known.count(key)) bad.push_back(key + " is not a declared field");
  if (report.contains("schema_version") && report["schema_version"] != kSchemaVersion)
    bad.push_back("schema_version mismatch");
  if (kind == "conditions" && report.contains("reports") && report["reports"].is_array()) {
    for (const auto& r : report["reports"]) {
      try {
        (void)conditions::report_from_json(r.dump());
      } catch (const std::exception& e) {
        bad.push_back(std::string("reports entry: ") + e.what());
      }
    }
  }
  return bad;
}

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e)) return ExitCode::validation;
  if (dynamic_cast<const std::ios_base::failure*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e))
    return ExitCode::io;
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const sim::EnsembleError*>(&e) ||
      dynamic_cast<const std::runtime_error*>(&e))
    return ExitCode::numerical;
  return ExitCode::internal;
}

}  // namespace svelab::cli
