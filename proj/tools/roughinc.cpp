// roughinc command-line runner.
//
//   roughinc <command> --config <file.json> [--out dir] [--seed n] [--level m]
//
// Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 solver did
// not certify. Errors are also written to stderr as one JSON object.
// ROUGHINC_LOG=quiet|info|debug sets the log verbosity (default info).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "roughinc.hpp"
#include "roughinc/acceptance.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roughinc;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotCertified : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int verbosity() {
  const char* v = std::getenv("ROUGHINC_LOG");
  if (!v) return 1;
  std::string s(v);
  if (s == "quiet" || s == "0") return 0;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

void log(int level, const std::string& msg) {
  if (level <= verbosity()) std::cerr << "[roughinc] " << msg << "\n";
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Vec read_vec(const json& j, const char* key, Vec fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return scalar(v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("'") + key + "' must be a number or a nonempty array");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  return out;
}

struct Context {
  json config;
  fs::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
};

DriverSpec driver_spec(const Context& ctx) {
  const json d = ctx.config.value("driver", json::object());
  allow_keys(d, "driver", {"kind", "hurst", "dim", "seed", "horizon", "level", "name", "method", "modes", "scale"});
  DriverSpec s;
  std::string kind = get_or<std::string>(d, "kind", "fbm");
  if (kind == "fbm") s.kind = DriverKind::fbm;
  else if (kind == "fourier") s.kind = DriverKind::fourier;
  else if (kind == "analytic") s.kind = DriverKind::analytic;
  else throw ConfigError("driver.kind must be fbm, fourier or analytic");
  s.hurst = get_or(d, "hurst", s.hurst);
  s.dim = get_or(d, "dim", s.dim);
  s.seed = get_or<std::uint64_t>(ctx.config, "seed", get_or<std::uint64_t>(d, "seed", s.seed));
  s.horizon = get_or(d, "horizon", s.horizon);
  s.level = get_or(ctx.config, "level", get_or(d, "level", s.level));
  s.name = get_or<std::string>(d, "name", s.name);
  s.modes = get_or(d, "modes", s.modes);
  s.scale = get_or(d, "scale", s.scale);
  std::string method = get_or<std::string>(d, "method", "automatic");
  if (method == "automatic") s.method = FbmMethod::automatic;
  else if (method == "cholesky") s.method = FbmMethod::cholesky;
  else if (method == "circulant") s.method = FbmMethod::circulant;
  else throw ConfigError("driver.method must be automatic, cholesky or circulant");
  if (ctx.seed) s.seed = *ctx.seed;
  if (ctx.level) s.level = *ctx.level;
  if (s.level < 1 || s.level > 24) throw ConfigError("level must lie in [1, 24]");
  if (s.dim < 1) throw ConfigError("driver.dim must be positive");
  if (!(s.horizon > 0.0)) throw ConfigError("driver.horizon must be positive");
  return s;
}

Path load_driver(const Context& ctx) {
  DriverSpec s = driver_spec(ctx);
  log(2, "sampling driver at level " + std::to_string(s.level) + ", seed " + std::to_string(s.seed));
  return sample_driver(s);
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) throw ConfigError(std::string("missing string '") + key + "'");
  return j.at(key).get<std::string>();
}

json exponents(const json& c) { return c.value("exponents", json::object()); }

int cmd_driver(const Context& ctx) {
  allow_keys(ctx.config, "config", {"driver", "seed", "level", "lift_alpha"});
  Path x = load_driver(ctx);
  write_path_csv(ctx.out / "driver.csv", x);
  if (ctx.config.contains("lift_alpha")) {
    RoughPath r = lift_piecewise_linear(x, ctx.config.at("lift_alpha").get<double>());
    write_text(ctx.out / "rough_path.csv", rough_path_csv(r));
  }
  log(1, "wrote " + (ctx.out / "driver.csv").string());
  return 0;
}

int cmd_norms(const Context& ctx) {
  allow_keys(ctx.config, "config", {"input", "p", "alpha"});
  fs::path input = required_string(ctx.config, "input");
  const double p = get_or(ctx.config, "p", 2.0);
  const double alpha = get_or(ctx.config, "alpha", 0.5);
  if (!(p >= 1.0)) throw ConfigError("p must be at least 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  Path x = read_path_csv(input);
  NormReport r = norm_report(x, p, alpha);
  json j = {{"p", p}, {"alpha", alpha}, {"p_variation", r.p_variation}, {"holder_seminorm", r.holder_seminorm}, {"sup_norm", r.sup_norm}, {"pvar_norm", r.pvar_norm}, {"holder_norm", r.holder_norm}, {"points", x.size()}};
  write_json(ctx.out / "norms.json", j);
  log(1, "p-variation " + fmt17(r.p_variation));
  return 0;
}

int cmd_integrate(const Context& ctx) {
  allow_keys(ctx.config, "config", {"mode", "driver", "integrand", "one_form", "alpha", "integrand_q", "seed", "level"});
  std::string mode = get_or<std::string>(ctx.config, "mode", "young");
  Path x = load_driver(ctx);
  if (mode == "young") {
    Context ic = ctx;
    ic.config = {{"driver", ctx.config.value("integrand", json::object())}};
    if (ctx.config.contains("level")) ic.config["level"] = ctx.config["level"];
    json& id = ic.config["driver"];
    if (!id.contains("dim")) id["dim"] = x.dim();
    if (!id.contains("horizon")) id["horizon"] = x.times.back();
    if (!id.contains("level") && x.grid) id["level"] = x.grid->level();
    Path y = load_driver(ic);
    YoungOptions opt;
    if (ctx.config.contains("alpha")) opt.driver_alpha = ctx.config["alpha"].get<double>();
    if (ctx.config.contains("integrand_q")) opt.integrand_q = ctx.config["integrand_q"].get<double>();
    Path I = young_integral(y, x, opt);
    write_path_csv(ctx.out / "integral.csv", I, "I");
    json j = {{"mode", mode}, {"value", std::vector<double>(I.values.col(I.values.cols() - 1).data(), I.values.col(I.values.cols() - 1).data() + I.dim())}};
    write_json(ctx.out / "integral.json", j);
  } else if (mode == "rough") {
    if (x.dim() != 1) throw ConfigError("rough mode integrates scalar one-forms against a scalar driver");
    const double alpha = get_or(ctx.config, "alpha", 0.45);
    RoughPath X = lift_piecewise_linear(x, alpha);
    OneForm G = make_one_form(parse_map_expr(required_string(ctx.config, "one_form")));
    Path ones(x.times, Mat::Ones(1, static_cast<Eigen::Index>(x.size())));
    ControlledPath I = rough_integral(one_form_integrand(G, x, ones, alpha, 2.0 * alpha), X);
    write_path_csv(ctx.out / "integral.csv", I.y, "I");
    json j = {{"mode", mode}, {"value", std::vector<double>{I.y.values(0, I.y.values.cols() - 1)}}};
    write_json(ctx.out / "integral.json", j);
  } else {
    throw ConfigError("mode must be young or rough");
  }
  return 0;
}

int cmd_ydi(const Context& ctx) {
  allow_keys(ctx.config, "config", {"driver", "map", "exponents", "xi", "solver", "seed", "level"});
  const json e = exponents(ctx.config);
  allow_keys(e, "exponents", {"alpha", "beta", "gamma", "p", "q"});
  const json s = ctx.config.value("solver", json::object());
  allow_keys(s, "solver", {"min_level", "max_level", "residual_tol", "concatenate"});
  YdiConfig cfg;
  cfg.alpha = get_or(e, "alpha", cfg.alpha);
  cfg.beta = get_or(e, "beta", cfg.beta);
  cfg.gamma = get_or(e, "gamma", cfg.gamma);
  cfg.p = get_or(e, "p", cfg.p);
  cfg.q = get_or(e, "q", cfg.q);
  cfg.xi = read_vec(ctx.config, "xi", cfg.xi);
  cfg.min_level = get_or(s, "min_level", cfg.min_level);
  cfg.max_level = get_or(s, "max_level", cfg.max_level);
  cfg.residual_tol = get_or(s, "residual_tol", cfg.residual_tol);
  cfg.concatenate = get_or(s, "concatenate", cfg.concatenate);
  cfg.validate();
  SetValuedMap F = make_state_map(parse_map_expr(required_string(ctx.config, "map")));
  Path x = load_driver(ctx);
  const double xa = holder_seminorm(x, cfg.alpha);
  YdiRun run = ydi_solve(F, x, cfg, xa);
  const YdiSolution& sol = run.solution;
  write_path_csv(ctx.out / "z.csv", sol.z, "z");
  write_path_csv(ctx.out / "v.csv", sol.v, "v");
  std::string table = "level,inclusion_residual,pvar_v,cauchy_certificate\n";
  for (const auto& lv : run.levels)
    table += std::to_string(lv.level) + "," + fmt17(lv.diagnostics.inclusion_residual) + "," + fmt17(lv.diagnostics.pvar_v) + "," +
             (lv.diagnostics.cauchy_certificate.empty() ? std::string() : fmt17(lv.diagnostics.cauchy_certificate.back())) + "\n";
  write_text(ctx.out / "levels.csv", table);
  const auto& d = sol.diagnostics;
  json j = {{"level", sol.level},
            {"inclusion_residual", d.inclusion_residual},
            {"pvar_v", d.pvar_v},
            {"cauchy_certificate", d.cauchy_certificate},
            {"T0", d.T0},
            {"x_alpha", xa},
            {"windows", d.windows},
            {"certified", d.certified}};
  // bounds on the largest dyadic prefix inside the validity window
  const double T = x.grid->horizon();
  int k = 0;
  while (k <= sol.level && std::ldexp(T, -k) > d.T0) ++k;
  if (k <= sol.level && d.windows == 1) {
    BoundReport b = bound_report(sol, cfg, x, std::ldexp(T, -k), d.T0);
    j["bound_report"] = {{"S", b.S},
                         {"pass", b.pass()},
                         {"uniform_worst_ratio", b.uniform_z.worst_ratio},
                         {"oscillation_worst_ratio", b.oscillation.worst_ratio},
                         {"pvar_v", b.pvar_v},
                         {"pvar_rhs", b.pvar_rhs}};
  }
  write_json(ctx.out / "diagnostics.json", j);
  if (!d.certified) throw NotCertified("ydi certificate did not reach residual_tol by max_level");
  return 0;
}

int cmd_selection(const Context& ctx) {
  allow_keys(ctx.config, "config", {"map", "xi", "q", "level", "measure_gamma_norm"});
  TimeSetMap F = make_time_map(parse_map_expr(required_string(ctx.config, "map")));
  int m = ctx.level ? *ctx.level : get_or(ctx.config, "level", 10);
  if (m < 1 || m > 20) throw ConfigError("level must lie in [1, 20]");
  const double q = get_or(ctx.config, "q", 1.5 / F.gamma);
  if (!(q > 1.0 / F.gamma)) throw ConfigError("q must exceed 1/gamma");
  Vec xi = ctx.config.contains("xi") ? read_vec(ctx.config, "xi", Vec()) : min_norm_selection(F(0.0));
  const double declared = F.gamma_norm;
  if (get_or(ctx.config, "measure_gamma_norm", false)) F.gamma_norm = estimate_gamma_norm_on_grid(F, m);
  SelectionResult r = select_path(F, xi, m);
  SelectionCertificate c = certify_selection(r, F, q);
  write_path_csv(ctx.out / "f.csv", r.f, "f");
  json osc = json::array();
  for (const auto& o : c.oscillation_checks)
    osc.push_back({{"r", o.r}, {"increment", o.increment}, {"increment_bound", o.increment_bound}, {"oscillation", o.oscillation},
                   {"oscillation_bound", o.oscillation_bound}, {"pass", o.pass}});
  json j = {{"level", m},
            {"q", q},
            {"gamma_norm", F.gamma_norm},
            {"gamma_norm_declared", declared},
            {"q_variation", c.q_variation},
            {"bound_rhs", c.bound_rhs},
            {"membership_residual", c.membership_residual},
            {"step_ratio", c.step_ratio},
            {"oscillation_checks", osc},
            {"pass", c.pass()}};
  write_json(ctx.out / "certificate.json", j);
  if (!c.pass()) throw NotCertified("selection certificate failed");
  return 0;
}

int cmd_rdi(const Context& ctx) {
  allow_keys(ctx.config, "config", {"driver", "map", "one_form", "exponents", "xi", "solver", "seed", "level", "mode"});
  const json e = exponents(ctx.config);
  allow_keys(e, "exponents", {"alpha", "beta", "gamma"});
  const json s = ctx.config.value("solver", json::object());
  allow_keys(s, "solver", {"L", "M", "theta", "max_iters", "fp_tol", "max_halvings"});
  RdiConfig cfg;
  cfg.alpha = get_or(e, "alpha", cfg.alpha);
  cfg.beta = get_or(e, "beta", cfg.beta);
  cfg.gamma = get_or(e, "gamma", cfg.gamma);
  cfg.xi = read_vec(ctx.config, "xi", cfg.xi);
  cfg.L = get_or(s, "L", cfg.L);
  cfg.M = get_or(s, "M", cfg.M);
  cfg.theta = get_or(s, "theta", cfg.theta);
  cfg.max_iters = get_or(s, "max_iters", cfg.max_iters);
  cfg.fp_tol = get_or(s, "fp_tol", cfg.fp_tol);
  cfg.max_halvings = get_or(s, "max_halvings", cfg.max_halvings);
  std::string mode = get_or<std::string>(ctx.config, "mode", "lsc");
  if (mode == "lsc") cfg.mode = RdiMode::lsc;
  else if (mode == "usc") cfg.mode = RdiMode::usc;
  else throw ConfigError("mode must be lsc or usc");
  cfg.validate();
  SetValuedMap F = make_state_map(parse_map_expr(required_string(ctx.config, "map")));
  OneForm G = make_one_form(parse_map_expr(required_string(ctx.config, "one_form")));
  RoughPath X = lift_piecewise_linear(load_driver(ctx), cfg.alpha);
  RdiSolution sol = rdi_fixed_point(F, G, X, cfg);
  write_path_csv(ctx.out / "z.csv", sol.z.y, "z");
  write_path_csv(ctx.out / "velocity.csv", sol.velocity, "w");
  json j = {{"certified", sol.certified},
            {"fixed_point_residual", sol.fixed_point_residual},
            {"inclusion_residual", sol.inclusion_residual},
            {"iterations", sol.iterations},
            {"T_star", sol.T_star},
            {"cone_violations", sol.cone_violations},
            {"bound_violated", sol.bound_violated},
            {"first_order_warning", sol.first_order_warning},
            {"bnorm",
             {{"zprime_holder", sol.bnorm.zprime_holder},
              {"remainder_holder", sol.bnorm.remainder_holder},
              {"max_speed", sol.bnorm.max_speed},
              {"speed_margin", sol.bnorm.speed_margin}}}};
  write_json(ctx.out / "residuals.json", j);
  if (sol.first_order_warning) log(1, "usc mode with a one-form of order < 2");
  if (!sol.certified) throw NotCertified("rdi fixed point not certified");
  return 0;
}

int cmd_check(const Context& ctx) {
  std::ostream* out = verbosity() > 0 ? &std::cout : nullptr;
  auto rep = acceptance::run_suite(ctx.out, out);
  if (!rep.pass()) throw NotCertified("acceptance suite failed");
  return 0;
}

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"code", code}, {"message", message}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Young and rough differential inclusions: samplers, integrals, solvers and certificates"};
  app.require_subcommand(1);
  std::string config_file, out_dir;
  std::uint64_t seed = 0;
  int level = 0;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Context&);
    bool needs_config;
  };
  const Command commands[] = {
      {"driver", "emit a sampled driver path", cmd_driver, true},
      {"norms", "p-variation and Hölder report for a CSV path", cmd_norms, true},
      {"integrate", "Young or rough integral", cmd_integrate, true},
      {"ydi", "Young differential inclusion with bound report", cmd_ydi, true},
      {"selection", "finite q-variation selection with certificate", cmd_selection, true},
      {"rdi", "rough differential inclusion with residuals", cmd_rdi, true},
      {"check", "run the acceptance suite", cmd_check, false},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    auto* opt = sub->add_option("--config", config_file, "JSON configuration file");
    if (c.needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides the driver seed");
    sub->add_option("--level", level, "overrides the grid level");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail(2, "config", e.what());
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const Command& cmd = commands[which];
  Context ctx;
  try {
    if (!config_file.empty()) {
      try {
        ctx.config = json::parse(read_text(config_file));
      } catch (const json::parse_error& e) {
        throw ConfigError(config_file + ": " + e.what());
      }
      if (!ctx.config.is_object()) throw ConfigError("configuration must be a JSON object");
    } else {
      ctx.config = json::object();
    }
    ctx.out = out_dir.empty() ? fs::path("out") / cmd.name : fs::path(out_dir);
    if (subs[which]->count("--seed")) ctx.seed = seed;
    if (subs[which]->count("--level")) ctx.level = level;
    fs::create_directories(ctx.out);
    return cmd.run(ctx);
  } catch (const NotCertified& e) {
    return fail(3, "not_certified", e.what());
  } catch (const IoError& e) {
    return fail(1, "io", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(1, "io", e.what());
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what());
  } catch (const json::exception& e) {
    return fail(2, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(2, "config", e.what());
  } catch (const std::exception& e) {
    return fail(1, "runtime", e.what());
  }
}
