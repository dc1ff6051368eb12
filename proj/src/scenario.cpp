#include "laxhopf/scenario.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "laxhopf/convex.hpp"
#include "laxhopf/discounted.hpp"
#include "laxhopf/economy.hpp"
#include "laxhopf/parallel.hpp"
#include "laxhopf/verify.hpp"

namespace laxhopf::scenario {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const Json* find(const Json& obj, const std::string& key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const Json& object_at(const Json& obj, const std::string& key, const std::string& path) {
  const Json* j = find(obj, key);
  if (!j) throw ConfigError(join(path, key), "missing section");
  if (!j->is_object()) throw ConfigError(join(path, key), "expected an object");
  return *j;
}

double number(const Json& obj, const std::string& key, const std::string& path,
              std::optional<double> fallback = std::nullopt) {
  const Json* j = find(obj, key);
  if (!j) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "missing number");
  }
  if (!j->is_number()) throw ConfigError(join(path, key), "expected a number");
  const double v = j->get<double>();
  if (!std::isfinite(v)) throw ConfigError(join(path, key), "must be finite");
  return v;
}

std::size_t count(const Json& obj, const std::string& key, const std::string& path,
                  std::size_t fallback) {
  const Json* j = find(obj, key);
  if (!j) return fallback;
  if (!j->is_number_unsigned()) throw ConfigError(join(path, key), "expected a non-negative integer");
  return j->get<std::size_t>();
}

bool flag(const Json& obj, const std::string& key, const std::string& path, bool fallback) {
  const Json* j = find(obj, key);
  if (!j) return fallback;
  if (!j->is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return j->get<bool>();
}

std::string text(const Json& obj, const std::string& key, const std::string& path) {
  const Json* j = find(obj, key);
  if (!j) throw ConfigError(join(path, key), "missing string");
  if (!j->is_string()) throw ConfigError(join(path, key), "expected a string");
  return j->get<std::string>();
}

Vec numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(fmt::format("{}.{}", path, i), "expected a number");
    v.push_back(j[i].get<double>());
  }
  return v;
}

Vec vector_field(const Json& obj, const std::string& key, const std::string& path,
                 std::optional<std::size_t> dim, std::optional<Vec> fallback = std::nullopt) {
  const Json* j = find(obj, key);
  if (!j) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "missing array");
  }
  Vec v = numbers(*j, join(path, key));
  if (dim && v.size() != *dim)
    throw ConfigError(join(path, key), fmt::format("expected {} entries, got {}", *dim, v.size()));
  return v;
}

std::string fmt_num(double v) { return fmt::format("{:.9g}", v); }

std::string fmt_vec(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_num(v[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Catalog resolution

CostField parse_cost(const Json& cfg, std::size_t dim) {
  const Json& c = object_at(cfg, "cost", "");
  const std::string name = text(c, "name", "cost");
  const Json* p = find(c, "params");
  const Vec params = p ? numbers(*p, "cost.params") : Vec{};
  std::optional<CostField> cost;
  try {
    cost = costs::by_name(name, params, dim);
  } catch (const MisuseError& e) {
    throw ConfigError("cost.params", e.what());
  }
  if (!cost) throw ConfigError("cost.name", fmt::format("unknown cost '{}'", name));
  if (const Json* box = find(c, "box")) {
    const Vec lo = vector_field(*box, "lo", "cost.box", dim);
    const Vec hi = vector_field(*box, "hi", "cost.box", dim);
    Box b;
    for (std::size_t i = 0; i < dim; ++i) b.push_back(Interval{lo[i], hi[i]});
    cost = costs::with_box(std::move(*cost), std::move(b));
  }
  return *cost;
}

TerminalCost parse_terminal(const Json& cfg, std::size_t dim) {
  const Json& c = object_at(cfg, "terminal", "");
  const std::string name = text(c, "name", "terminal");
  const Json* p = find(c, "params");
  const Vec params = p ? numbers(*p, "terminal.params") : Vec{};
  std::optional<TerminalCost> t;
  try {
    t = terminals::by_name(name, params, dim);
  } catch (const MisuseError& e) {
    throw ConfigError("terminal.params", e.what());
  }
  if (!t) throw ConfigError("terminal.name", fmt::format("unknown terminal cost '{}'", name));
  return *t;
}

RateField parse_rate(const Json& cfg) {
  const Json& c = object_at(cfg, "rate", "");
  const std::string name = text(c, "name", "rate");
  const Json* p = find(c, "params");
  const Vec params = p ? numbers(*p, "rate.params") : Vec{};
  std::optional<RateField> r;
  try {
    r = rates::by_name(name, params);
  } catch (const MisuseError& e) {
    throw ConfigError("rate.params", e.what());
  }
  if (!r) throw ConfigError("rate.name", fmt::format("unknown rate '{}'", name));
  return *r;
}

OuterGrid parse_grid(const Json& cfg, double T, std::size_t dim) {
  static const Json empty = Json::object();
  const Json* found = find(cfg, "grid");
  const Json& g = found ? *found : empty;
  const Vec lo = vector_field(g, "upsilon_lo", "grid", dim, Vec(dim, -2.0));
  const Vec hi = vector_field(g, "upsilon_hi", "grid", dim, Vec(dim, 2.0));
  const Vec step = vector_field(g, "upsilon_step", "grid", dim, Vec(dim, 0.25));
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(step[i] > 0.0)) throw ConfigError("grid.upsilon_step", "steps must be positive");
    if (hi[i] < lo[i]) throw ConfigError("grid.upsilon_hi", "upper bound below lower bound");
  }
  OuterGrid grid;
  if (const Json* w = find(g, "omega_values")) {
    grid.omega_values = numbers(*w, "grid.omega_values");
    bool has_zero = false;
    for (double v : grid.omega_values) {
      if (v < 0.0) throw ConfigError("grid.omega_values", "apertures must be >= 0");
      has_zero = has_zero || v == 0.0;
    }
    if (!has_zero) throw ConfigError("grid.omega_values", "must contain 0");
    grid.upsilon_lattice = Lattice::uniform(lo, hi, step);
    grid.omega_max = number(g, "omega_max", "grid", 0.0);
  } else {
    const double omega_max = number(g, "omega_max", "grid", T);
    const std::size_t n = count(g, "n_omega", "grid", 10);
    if (!(omega_max > 0.0)) throw ConfigError("grid.omega_max", "must be positive");
    if (n == 0) throw ConfigError("grid.n_omega", "must be at least 1");
    grid = OuterGrid::uniform(omega_max, n, lo, hi, step);
  }
  grid.refine = flag(g, "refine", "grid", true);
  grid.rounds = count(g, "rounds", "grid", grid.rounds);
  grid.use_anchors = flag(g, "use_anchors", "grid", true);
  return grid;
}

SolverConfig parse_solver(const Json& cfg, const Options& opts) {
  static const Json empty = Json::object();
  const Json* found = find(cfg, "solver");
  const Json& s = found ? *found : empty;
  SolverConfig sc;
  sc.n_steps = count(s, "n_steps", "solver", sc.n_steps);
  if (sc.n_steps == 0) throw ConfigError("solver.n_steps", "must be at least 1");
  sc.max_iterations = count(s, "max_iterations", "solver", sc.max_iterations);
  sc.restarts = count(s, "restarts", "solver", sc.restarts);
  sc.grad_tol = number(s, "grad_tol", "solver", sc.grad_tol);
  sc.initial_step = number(s, "initial_step", "solver", sc.initial_step);
  sc.tol_solver = number(s, "tol_solver", "solver", sc.tol_solver);
  sc.seed = count(s, "seed", "solver", 0);
  if (opts.seed) sc.seed = *opts.seed;
  sc.threads = opts.threads ? *opts.threads : threads_from_env();
  if (sc.threads == 0) sc.threads = 1;
  return sc;
}

void check_schema(const Json& cfg) {
  if (!cfg.is_object()) throw ConfigError("", "config must be a JSON object");
  const Json* s = find(cfg, "schema");
  if (!s) throw ConfigError("schema", "missing schema version");
  if (!s->is_number_integer() || s->get<int>() != kSchemaVersion)
    throw ConfigError("schema", fmt::format("unsupported schema, expected {}", kSchemaVersion));
}

Vec parse_state(const Json& cfg) {
  Vec x = vector_field(cfg, "x", "", std::nullopt);
  if (x.empty()) throw ConfigError("x", "state must have at least one coordinate");
  if (const Json* d = find(cfg, "dimension")) {
    if (!d->is_number_unsigned() || d->get<std::size_t>() != x.size())
      throw ConfigError("dimension", "does not match the length of x");
  }
  return x;
}

VelocityBound parse_bound(const Json& j, const std::string& path) {
  if (j.is_number()) return VelocityBound(j.get<double>());
  if (!j.is_array()) throw ConfigError(path, "expected a number or a table of [t, bound] pairs");
  std::vector<std::pair<double, double>> table;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vec pair = numbers(j[i], fmt::format("{}.{}", path, i));
    if (pair.size() != 2) throw ConfigError(fmt::format("{}.{}", path, i), "expected [t, bound]");
    table.emplace_back(pair[0], pair[1]);
  }
  try {
    return VelocityBound(std::move(table));
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

struct EconomySetup {
  ImpetusCostSpec spec;
  EconomyLayout layout;
  EconomyState state;
};

EconomySetup parse_economy(const Json& cfg) {
  const Json& e = object_at(cfg, "economy", "");
  EconomySetup s;
  const Json* alloc = find(e, "allocations");
  const Json* prices = find(e, "prices");
  if (!alloc || !alloc->is_array() || alloc->empty())
    throw ConfigError("economy.allocations", "expected a non-empty array of vectors");
  if (!prices || !prices->is_array() || prices->empty())
    throw ConfigError("economy.prices", "expected a non-empty array of vectors");
  for (std::size_t i = 0; i < alloc->size(); ++i)
    s.state.allocations.push_back(numbers((*alloc)[i], fmt::format("economy.allocations.{}", i)));
  for (std::size_t i = 0; i < prices->size(); ++i)
    s.state.prices.push_back(numbers((*prices)[i], fmt::format("economy.prices.{}", i)));
  s.layout.shared_price = flag(e, "shared_price", "economy", s.state.prices.size() == 1);
  s.layout.agents = s.state.agents();
  if (s.state.prices.size() != s.layout.price_count())
    throw ConfigError("economy.prices", "one price vector per agent, or one when shared");
  try {
    s.layout.dimension = s.state.dimension();
  } catch (const MisuseError& err) {
    throw ConfigError("economy.allocations", err.what());
  }

  const std::string scalar = text(e, "scalar_cost", "economy");
  s.spec.scalar_name = scalar;
  if (scalar == "half_square")
    s.spec.scalar_cost = [](double v) { return 0.5 * v * v; };
  else if (scalar == "abs")
    s.spec.scalar_cost = [](double v) { return std::abs(v); };
  else
    throw ConfigError("economy.scalar_cost", fmt::format("unknown scalar cost '{}'", scalar));
  s.spec.shared_price = s.layout.shared_price;

  const Json* pb = find(e, "price_bound");
  if (!pb) throw ConfigError("economy.price_bound", "missing");
  s.spec.price_bound = parse_bound(*pb, "economy.price_bound");
  const Json* ab = find(e, "agent_bounds");
  if (!ab || !ab->is_array() || ab->size() != s.layout.agents)
    throw ConfigError("economy.agent_bounds", "expected one bound per agent");
  for (std::size_t i = 0; i < ab->size(); ++i)
    s.spec.agent_bounds.push_back(parse_bound((*ab)[i], fmt::format("economy.agent_bounds.{}", i)));
  return s;
}

// ---------------------------------------------------------------------------
// Artifacts

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(fmt::format("cannot write {}", path.string()));
  os << content;
}

std::optional<fs::path> prepare_out(const Options& opts) {
  if (!opts.out_dir) return std::nullopt;
  fs::create_directories(*opts.out_dir);
  return *opts.out_dir;
}

Outcome value_outcome(const ValueResult& r, const Options& opts) {
  std::ostringstream js;
  write_value_json(js, r);
  Outcome out;
  out.result = Json::parse(js.str());
  if (auto dir = prepare_out(opts)) {
    write_file(*dir / "result.json", js.str());
    if (r.trajectory) {
      std::ostringstream csv;
      write_trajectory_csv(csv, *r.trajectory);
      write_file(*dir / "trajectory.csv", csv.str());
    }
  }
  if (r.value.is_infinite()) {
    out.exit_code = kExitInfeasible;
    out.summary = "V=inf (infeasible on the whole grid)";
    return out;
  }
  std::string cert = "=n/a";
  if (r.certificate_residual)
    cert = *r.certificate_residual < 1e-9 ? "<1e-9" : "=" + fmt::format("{:.3g}", *r.certificate_residual);
  out.summary = fmt::format("V={} omega={} upsilon={} cert{}", fmt_num(r.value.value()),
                            fmt_num(r.omega_star), fmt_vec(r.upsilon_star), cert);
  return out;
}

Lattice lattice_field(const Json& obj, const std::string& prefix, const std::string& path,
                      std::size_t dim) {
  const Vec lo = vector_field(obj, prefix + "_lo", path, dim);
  const Vec hi = vector_field(obj, prefix + "_hi", path, dim);
  const Vec step = vector_field(obj, prefix + "_step", path, dim);
  for (std::size_t i = 0; i < dim; ++i)
    if (!(step[i] > 0.0) || hi[i] < lo[i])
      throw ConfigError(join(path, prefix + "_step"), "need positive steps and lo <= hi");
  return Lattice::uniform(lo, hi, step);
}

void maybe_write_moderation_table(const Json& cfg, const CostField& cost, double T, const Vec& x,
                                  const SolverConfig& sc, const Options& opts) {
  const Json* mt = find(cfg, "moderation_table");
  auto dir = prepare_out(opts);
  if (!mt || !dir) return;
  const Vec omegas = vector_field(*mt, "omega_values", "moderation_table", std::nullopt);
  for (double w : omegas)
    if (w < 0.0) throw ConfigError("moderation_table.omega_values", "apertures must be >= 0");
  const Lattice ups = lattice_field(*mt, "upsilon", "moderation_table", x.size());
  const ModerationTable table = build_moderation_table(cost, T, x, omegas, ups, sc);
  std::ostringstream csv;
  write_moderation_csv(csv, table);
  write_file(*dir / "moderation_table.csv", csv.str());
}

// ---------------------------------------------------------------------------
// Kinds

Outcome run_value_kind(const std::string& kind, const Json& cfg, const Options& opts) {
  const double T = number(cfg, "T", "", 1.0);
  const SolverConfig sc = parse_solver(cfg, opts);

  if (kind == "economy") {
    EconomySetup e = parse_economy(cfg);
    const std::size_t flat = e.layout.flat_size();
    const TerminalCost terminal = parse_terminal(cfg, flat);
    const OuterGrid grid = parse_grid(cfg, T, flat);
    ValueResult r = economic_value(terminal, e.spec, e.layout, T, e.state, grid, sc);
    r.certificate_residual = economy_enrichment_certificate(r, terminal, e.spec, e.layout);
    return value_outcome(r, opts);
  }

  const Vec x = parse_state(cfg);
  const std::size_t dim = x.size();
  const TerminalCost terminal = parse_terminal(cfg, dim);

  if (kind == "wtp") {
    const Json& w = object_at(cfg, "wtp", "");
    const double bound = number(w, "velocity_bound", "wtp");
    const double omega = number(w, "omega", "wtp");
    if (bound < 0.0) throw ConfigError("wtp.velocity_bound", "must be >= 0");
    if (omega < 0.0) throw ConfigError("wtp.omega", "must be >= 0");
    const Lattice lat = lattice_field(object_at(w, "state_grid", "wtp"), "state", "wtp.state_grid", dim);
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < lat.size(); ++i) pts.push_back(lat.point(i));
    const ExtReal v = wtp_value(terminal, bound, T, x, omega, pts);
    Outcome out;
    out.result = Json{{"value", v.is_finite() ? Json(v.value()) : Json("inf")}};
    if (auto dir = prepare_out(opts)) write_file(*dir / "result.json", out.result.dump(2) + "\n");
    out.exit_code = v.is_finite() ? kExitOk : kExitInfeasible;
    out.summary = fmt::format("W={} omega={}", to_string(v), fmt_num(omega));
    return out;
  }

  const CostField cost = parse_cost(cfg, dim);
  const OuterGrid grid = parse_grid(cfg, T, dim);
  ValueResult r;
  if (kind == "classic") {
    if (!cost.velocity_only || !cost.convex_in_u)
      throw ConfigError("cost.name", "the classic formula needs a velocity-only convex cost");
    r = classic_lax_hopf(terminal, cost, T, x, grid, sc.n_steps);
  } else if (kind == "generalized") {
    r = generalized_lax_hopf(terminal, cost, T, x, grid, sc);
  } else {
    r = discounted_value(terminal, cost, parse_rate(cfg), T, x, grid, sc);
  }
  Outcome out = value_outcome(r, opts);
  maybe_write_moderation_table(cfg, cost, T, x, sc, opts);
  return out;
}

Outcome run_verify(const Json& cfg, const Options& opts) {
  const double T = number(cfg, "T", "", 1.0);
  const Vec x = parse_state(cfg);
  const std::size_t dim = x.size();
  const SolverConfig sc = parse_solver(cfg, opts);
  ConvergenceScenario scenario{parse_terminal(cfg, dim), parse_cost(cfg, dim), T, x,
                               parse_grid(cfg, T, dim), sc, std::nullopt};
  const Json& dp = object_at(cfg, "dp", "");
  const double t0 = number(dp, "t0", "dp", 0.0);
  if (!(T > t0)) throw ConfigError("dp.t0", "must be below T");
  const Json* lv = find(dp, "levels");
  if (!lv || !lv->is_array() || lv->size() < 2)
    throw ConfigError("dp.levels", "need at least two refinement levels");
  std::vector<ConvergenceLevel> levels;
  for (std::size_t i = 0; i < lv->size(); ++i) {
    const std::string path = fmt::format("dp.levels.{}", i);
    const Json& l = (*lv)[i];
    const double dt = number(l, "dt", path);
    if (!(dt > 0.0)) throw ConfigError(path + ".dt", "must be positive");
    const double n = std::round((T - t0) / dt);
    if (n < 1.0 || std::abs(n * dt - (T - t0)) > 1e-9 * (T - t0))
      throw ConfigError(path + ".dt", "must divide the horizon");
    DPGrids g;
    g.t0 = t0;
    g.T = T;
    g.n_time = static_cast<std::size_t>(n);
    g.state_lo = vector_field(dp, "state_lo", "dp", dim);
    g.state_hi = vector_field(dp, "state_hi", "dp", dim);
    g.velocity_lo = vector_field(dp, "velocity_lo", "dp", dim);
    g.velocity_hi = vector_field(dp, "velocity_hi", "dp", dim);
    g.state_step = vector_field(l, "state_step", path, dim);
    g.velocity_step = vector_field(l, "velocity_step", path, dim);
    levels.push_back({count(l, "n_steps", path, g.n_time), std::move(g)});
  }
  const auto rows = convergence_study(scenario, levels);
  const bool ok = final_levels_nonincreasing(rows);

  Outcome out;
  out.result = Json::object();
  out.result["rows"] = Json::array();
  for (const auto& r : rows) {
    auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json("inf"); };
    out.result["rows"].push_back(
        {{"dt", r.dt}, {"formula", num(r.formula)}, {"oracle", num(r.oracle)}, {"error", num(r.error)}});
  }
  out.result["final_levels_nonincreasing"] = ok;
  if (auto dir = prepare_out(opts)) {
    std::ostringstream csv;
    write_convergence_csv(csv, rows);
    write_file(*dir / "convergence.csv", csv.str());
    write_file(*dir / "result.json", out.result.dump(2) + "\n");
    const Json* outputs = find(cfg, "outputs");
    if (outputs && flag(*outputs, "surface", "outputs", false)) {
      const ValueSurface surf = dp_oracle(scenario.terminal, scenario.cost, levels.back().grids);
      std::ostringstream s;
      write_surface_csv(s, surf);
      write_file(*dir / "surface.csv", s.str());
    }
  }
  out.exit_code = ok ? kExitOk : kExitFailure;
  out.summary = fmt::format("levels={} final_error={} nonincreasing={}", rows.size(),
                            fmt_num(rows.back().error), ok ? "yes" : "no");
  return out;
}

template <class F>
Outcome guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return Outcome{kExitConfig, fmt::format("config error at {}", e.what()), Json()};
  } catch (const Error& e) {
    return Outcome{kExitFailure, fmt::format("error: {}", e.what()), Json()};
  } catch (const fs::filesystem_error& e) {
    return Outcome{kExitFailure, fmt::format("error: {}", e.what()), Json()};
  }
}

std::string kind_of(const Json& cfg) {
  const std::string kind = text(cfg, "kind", "");
  for (const char* k : {"classic", "generalized", "discounted", "economy", "wtp", "verify"})
    if (kind == k) return kind;
  throw ConfigError("kind", fmt::format("unknown kind '{}'", kind));
}

}  // namespace

Json load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", fmt::format("cannot open {}", path.string()));
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", fmt::format("malformed JSON: {}", e.what()));
  }
}

Outcome run(const Json& config, const Options& opts) {
  return guarded([&] {
    check_schema(config);
    const std::string kind = kind_of(config);
    return kind == "verify" ? run_verify(config, opts) : run_value_kind(kind, config, opts);
  });
}

Outcome verify(const Json& config, const Options& opts) {
  return guarded([&] {
    check_schema(config);
    return run_verify(config, opts);
  });
}

Outcome conjugate(const Json& config, const Options& opts) {
  return guarded([&] {
    check_schema(config);
    const Vec x = parse_state(config);
    const std::size_t dim = x.size();
    const CostField cost = parse_cost(config, dim);
    const Json& c = object_at(config, "conjugate", "");
    const double t = number(c, "t", "conjugate", number(config, "T", "", 1.0));
    const Lattice dual = lattice_field(c, "dual", "conjugate", dim);
    const Lattice vel = lattice_field(c, "velocity", "conjugate", dim);
    const ConjugateTable table = build_conjugate_table(cost, t, x, dual, vel);
    Outcome out;
    if (auto dir = prepare_out(opts)) {
      std::ostringstream csv;
      for (std::size_t i = 1; i <= dim; ++i) csv << "p_" << i << ',';
      csv << "l_star\n";
      Vec p(dim);
      for (std::size_t i = 0; i < dual.size(); ++i) {
        dual.point(i, p);
        for (double v : p) csv << format_real(v) << ',';
        csv << format_real(table.values[i]) << '\n';
      }
      write_file(*dir / "conjugate.csv", csv.str());
    }
    out.summary = fmt::format("conjugate points={} midpoint_convex={}", dual.size(),
                              table.is_midpoint_convex(1e-9) ? "yes" : "no");
    return out;
  });
}

Outcome moderate(const Json& config, const Options& opts) {
  return guarded([&] {
    check_schema(config);
    const Vec x = parse_state(config);
    const CostField cost = parse_cost(config, x.size());
    const double T = number(config, "T", "", 1.0);
    const SolverConfig sc = parse_solver(config, opts);
    const Json& mt = object_at(config, "moderation_table", "");
    const Vec omegas = vector_field(mt, "omega_values", "moderation_table", std::nullopt);
    for (double w : omegas)
      if (w < 0.0) throw ConfigError("moderation_table.omega_values", "apertures must be >= 0");
    const Lattice ups = lattice_field(mt, "upsilon", "moderation_table", x.size());
    const ModerationTable table = build_moderation_table(cost, T, x, omegas, ups, sc);
    if (auto dir = prepare_out(opts)) {
      std::ostringstream csv;
      write_moderation_csv(csv, table);
      write_file(*dir / "moderation_table.csv", csv.str());
    }
    std::size_t finite = 0;
    for (const auto& v : table.values) finite += v.is_finite();
    Outcome out;
    out.summary = fmt::format("moderation cells={} finite={}", table.values.size(), finite);
    return out;
  });
}

Outcome sweep(const Json& config, const std::string& axis, const std::vector<double>& values,
              const Options& opts) {
  return guarded([&] {
    check_schema(config);
    std::string pointer;
    std::size_t start = 0;
    while (start <= axis.size()) {
      const std::size_t dot = axis.find('.', start);
      const std::string part = axis.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw ConfigError(axis, "malformed axis path");
      pointer += "/" + part;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    const Json::json_pointer ptr(pointer);
    if (!config.contains(ptr) || !config.at(ptr).is_number())
      throw ConfigError(axis, "axis must address an existing numeric field");

    std::ostringstream csv;
    csv << "value,exit_code,V,omega_star,upsilon_star,certificate_residual\n";
    auto cell = [](const Json& r, const char* key) -> std::string {
      if (!r.is_object() || !r.contains(key) || r[key].is_null()) return "";
      const Json& v = r[key];
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number()) return format_real(v.get<double>());
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_real(v[i].get<double>());
      return s;
    };
    Options row_opts = opts;
    row_opts.out_dir.reset();
    std::size_t failed = 0;
    for (double v : values) {
      Json cfg = config;
      cfg[ptr] = v;
      const Outcome o = run(cfg, row_opts);
      failed += o.exit_code != kExitOk;
      csv << format_real(v) << ',' << o.exit_code << ',' << cell(o.result, "value") << ','
          << cell(o.result, "omega_star") << ',' << cell(o.result, "upsilon_star") << ','
          << cell(o.result, "certificate_residual") << '\n';
    }
    Outcome out;
    if (auto dir = prepare_out(opts)) write_file(*dir / "sweep.csv", csv.str());
    out.result = Json{{"csv", csv.str()}};
    out.summary = fmt::format("sweep {} rows={} failed={}", axis, values.size(), failed);
    return out;
  });
}

}  // namespace laxhopf::scenario
