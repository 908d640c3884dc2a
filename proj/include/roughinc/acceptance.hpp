#pragma once

// Acceptance suite. Each criterion computes its metrics, writes
// deterministic artifacts under <out>/artifacts/<id>/ and reports a single
// line. Wall-clock times are printed but never written to artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "roughinc/drivers.hpp"
#include "roughinc/io.hpp"
#include "roughinc/map_expr.hpp"
#include "roughinc/norms.hpp"
#include "roughinc/rdi.hpp"
#include "roughinc/rough.hpp"
#include "roughinc/selection.hpp"
#include "roughinc/young.hpp"
#include "roughinc/ydi.hpp"

namespace roughinc::acceptance {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
  json metrics = json::object();
};

struct Criterion {
  int number = 0;
  std::string id;
  double budget_seconds = 0.0;
  std::function<Outcome(const fs::path& dir)> run;
};

struct Result {
  int number = 0;
  std::string id;
  Outcome outcome;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  bool within_budget() const { return seconds <= budget_seconds; }
  bool pass() const { return outcome.pass && within_budget(); }
};

namespace detail {

inline std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

// Exhaustive sup over all partitions that keep both endpoints.
inline double pvar_enumerate(const Mat& v, double p) {
  const auto n = v.cols();
  if (n < 2) return 0.0;
  const int interior = static_cast<int>(n - 2);
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << interior); ++mask) {
    double sum = 0.0;
    Eigen::Index prev = 0;
    for (int b = 0; b <= interior; ++b) {
      Eigen::Index k = b < interior ? b + 1 : n - 1;
      if (b < interior && !(mask >> b & 1u)) continue;
      sum += std::pow((v.col(k) - v.col(prev)).norm(), p);
      prev = k;
    }
    best = std::max(best, sum);
  }
  return std::pow(best, 1.0 / p);
}

// Composite Simpson rule on [0,T] with 2N panels.
inline double simpson(const std::function<double(double)>& f, double T, int N) {
  const double h = T / (2.0 * N);
  double s = f(0.0) + f(T);
  for (int i = 1; i < 2 * N; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

struct Fixtures {
  std::optional<Path> fbm08;
  std::optional<RoughPath> fbm045;

  const Path& fbm_h08() {
    if (!fbm08) {
      DriverSpec s;
      s.hurst = 0.8;
      s.seed = 42;
      s.level = 12;
      fbm08 = sample_fbm(s);
    }
    return *fbm08;
  }
  const RoughPath& fbm_h045() {
    if (!fbm045) {
      DriverSpec s;
      s.hurst = 0.45;
      s.seed = 3;
      s.level = 12;
      fbm045 = lift_piecewise_linear(sample_fbm(s), 0.45);
    }
    return *fbm045;
  }
};

inline std::vector<Criterion> criteria(Fixtures& fx) {
  std::vector<Criterion> out;

  out.push_back({1, "pvar_dp_matches_enumeration", 5.0, [](const fs::path& dir) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> npts(2, 12), ndim(1, 3), coin(0, 2);
    std::uniform_real_distribution<double> pdist(1.0, 4.0);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    std::string table = "case,points,dim,p,dp,enumerated\n";
    for (int c = 0; c < 200; ++c) {
      const int n = npts(rng), d = ndim(rng);
      const double p = pdist(rng);
      const bool integer_valued = coin(rng) == 0;
      Mat v(d, n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i) v(i, j) = integer_valued ? std::round(2.0 * nd(rng)) : nd(rng);
      std::vector<double> t(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)] = j / double(n - 1);
      Mat copy = v;
      Path path(t, std::move(copy));
      const double dp = p_variation(path, p);
      const double ex = pvar_enumerate(v, p);
      worst = std::max(worst, std::abs(dp - ex) / std::max(1.0, ex));
      table += std::to_string(c) + "," + std::to_string(n) + "," + std::to_string(d) + "," + fmt17(p) + "," + fmt17(dp) + "," + fmt17(ex) + "\n";
    }
    write_text(dir / "cases.csv", table);
    Outcome o;
    o.pass = worst <= 1e-12;
    o.metrics = {{"cases", 200}, {"worst_relative_gap", worst}, {"tolerance", 1e-12}};
    o.detail = "worst gap " + sci(worst) + " <= 1e-12";
    return o;
  }});

  out.push_back({2, "young_integral_cos_dsin", 5.0, [](const fs::path& dir) {
    const double exact = 0.5 + std::sin(2.0) / 4.0;
    std::vector<double> err;
    std::string table = "level,integral,error\n";
    for (int m = 8; m <= 16; ++m) {
      DyadicGrid g(1.0, m);
      Path I = young_integral(analytic("cosine", g), analytic("sine", g));
      double v = I.values(0, I.values.cols() - 1);
      err.push_back(std::abs(v - exact));
      table += std::to_string(m) + "," + fmt17(v) + "," + fmt17(err.back()) + "\n";
    }
    write_text(dir / "convergence.csv", table);
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < err.size(); ++i) min_ratio = std::min(min_ratio, err[i - 1] / err[i]);
    Outcome o;
    o.pass = err.back() <= 1e-8 && min_ratio >= 1.8;
    o.metrics = {{"error_level16", err.back()}, {"min_contraction", min_ratio}};
    o.detail = "err " + sci(err.back()) + " <= 1e-8, contraction " + sci(min_ratio) + " >= 1.8";
    return o;
  }});

  out.push_back({3, "chen_relation_fbm_lift", 10.0, [](const fs::path& dir) {
    DriverSpec s;
    s.hurst = 0.4;
    s.seed = 7;
    s.level = 10;
    s.dim = 2;
    RoughPath r = lift_piecewise_linear(sample_fbm(s), 0.35);
    ChenReport c = chen_report(r);
    const double geo = geometricity_defect(r);
    Outcome o;
    o.metrics = {{"chen_defect", c.chen_defect}, {"antisymmetric_defect", c.antisymmetric_defect},
                 {"symmetric_defect", c.symmetric_defect}, {"geometricity_defect", geo}};
    write_json(dir / "chen.json", o.metrics);
    o.pass = c.chen_defect < 1e-12 && c.antisymmetric_defect < 1e-14;
    o.detail = "chen " + sci(c.chen_defect) + " < 1e-12, antisym " + sci(c.antisymmetric_defect) + " < 1e-14";
    return o;
  }});

  out.push_back({4, "rough_integral_circle", 10.0, [](const fs::path& dir) {
    DyadicGrid g(1.0, 14);
    RoughPath r = lift_piecewise_linear(analytic("circle", g, 2), 0.5);
    // g(x) = x used as an integrand: Y(x) v = x (x) v, a 4 x 2 matrix.
    SmoothMap f;
    f.in_dim = 2;
    f.out_dim = 8;
    f.value = [](const Vec& x) {
      Mat y = Mat::Zero(4, 2);
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i) y(a + 2 * i, i) = x[a];
      return flatten(y);
    };
    f.jacobian = [](const Vec&) {
      Mat j = Mat::Zero(8, 2);
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i) j(a + 2 * i + 4 * i, a) = 1.0;
      return j;
    };
    ControlledPath I = rough_integral(compose_controlled(f, controlled_driver(r), 2), r);
    Vec got = I.y.at(I.y.size() - 1);
    // entry a + 2i is int x^a dx^i with x = (sin, cos)
    std::function<double(double)> xs[2] = {[](double t) { return std::sin(t); }, [](double t) { return std::cos(t); }};
    std::function<double(double)> dxs[2] = {[](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); }};
    double worst = 0.0;
    json entries = json::array();
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i) {
        double q = simpson([&](double t) { return xs[a](t) * dxs[i](t); }, 1.0, 1 << 12);
        worst = std::max(worst, std::abs(got[a + 2 * i] - q));
        entries.push_back({{"a", a}, {"i", i}, {"rough", got[a + 2 * i]}, {"quadrature", q}});
      }
    Outcome o;
    o.metrics = {{"max_error", worst}, {"entries", entries}};
    write_json(dir / "integral.json", o.metrics);
    o.pass = worst <= 1e-6;
    o.detail = "err " + sci(worst) + " <= 1e-6";
    return o;
  }});

  out.push_back({5, "rde_exponential_sine", 10.0, [](const fs::path& dir) {
    DyadicGrid g(1.0, 14);
    RoughPath r = lift_piecewise_linear(analytic("sine", g), 0.5);
    OneForm G = make_one_form(parse_map_expr("linear(a=1)"));
    const double xi = 1.0;
    RdeResult res = rde_solve(G, r, scalar(xi));
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      worst = std::max(worst, std::abs(res.z.y.values(0, static_cast<Eigen::Index>(i)) - xi * std::exp(std::sin(r.times()[i]))));
    Outcome o;
    o.metrics = {{"sup_error", worst}, {"converged", res.converged}, {"iterations", res.iterations}, {"residual", res.residual}};
    write_json(dir / "rde.json", o.metrics);
    o.pass = res.converged && worst <= 1e-5;
    o.detail = "sup err " + sci(worst) + " <= 1e-5";
    return o;
  }});

  out.push_back({6, "ydi_singleton_matches_ode", 60.0, [&fx](const fs::path& dir) {
    const Path& x = fx.fbm_h08();
    SetValuedMap F = make_state_map(parse_map_expr("singleton_sine(a=0.1)"));
    const Vec xi = scalar(1.0);
    YoungOdeResult ode = young_ode_solve([](const Vec& z) { return Mat::Constant(1, 1, 0.1 * std::sin(z[0])); }, x, xi);
    std::vector<double> err;
    double incl = 0.0;
    std::string table = "level,sup_error,inclusion_residual\n";
    for (int m = 8; m <= 12; ++m) {
      YdiSolution sol = ydi_approximate(F, x, xi, m);
      err.push_back((sol.z.values - ode.z.values).cwiseAbs().maxCoeff());
      double r = inclusion_residual(sol, F);
      incl = std::max(incl, r);
      table += std::to_string(m) + "," + fmt17(err.back()) + "," + fmt17(r) + "\n";
    }
    write_text(dir / "convergence.csv", table);
    bool monotone = true;
    for (std::size_t i = 1; i < err.size(); ++i) monotone = monotone && err[i] < err[i - 1];
    Outcome o;
    o.metrics = {{"error_level12", err.back()}, {"monotone", monotone}, {"inclusion_residual", incl}, {"ode_converged", ode.converged}};
    o.pass = ode.converged && err.back() <= 1e-2 && monotone && incl == 0.0;
    o.detail = "err " + sci(err.back()) + " <= 1e-2, monotone " + (monotone ? "yes" : "no") + ", inclusion " + sci(incl);
    return o;
  }});

  out.push_back({7, "ydi_level_uniform_bounds", 60.0, [&fx](const fs::path& dir) {
    Path x = fx.fbm_h08();
    x.values /= holder_seminorm(x, 0.75);
    const double xa = holder_seminorm(x, 0.75);
    SetValuedMap F = make_state_map(parse_map_expr("two_point(a=0.05,lo=0,hi=0.05)"));
    F.sup_bound = 0.1;
    F.gamma_norm = 0.1;
    YdiConfig cfg;
    cfg.xi = scalar(0.3);
    const double T0 = horizon_T0(cfg.alpha, cfg.beta, cfg.gamma, F.sup_bound, F.gamma_norm, xa);
    double ratio[3] = {0, 0, 0}, rep = 0.0;
    bool pass = T0 == 1.0;
    std::string table = "level,uniform_ratio,oscillation_ratio,pvar_v,pvar_rhs,representation_defect\n";
    for (int m = 0; m <= 12; ++m) {
      YdiSolution sol = ydi_approximate(F, x, cfg.xi, m);
      BoundReport b = bound_report(sol, cfg, x, 1.0, T0);
      pass = pass && b.pass();
      ratio[0] = std::max(ratio[0], b.uniform_z.worst_ratio);
      ratio[1] = std::max(ratio[1], b.oscillation.worst_ratio);
      ratio[2] = std::max(ratio[2], b.pvar_bound.worst_ratio);
      double r = 0.0;
      for (int n = 0; n <= m; ++n) r = std::max(r, representation_check(sol, x, n));
      rep = std::max(rep, r);
      table += std::to_string(m) + "," + fmt17(b.uniform_z.worst_ratio) + "," + fmt17(b.oscillation.worst_ratio) + "," + fmt17(b.pvar_v) + "," +
               fmt17(b.pvar_rhs) + "," + fmt17(r) + "\n";
    }
    write_text(dir / "bounds.csv", table);
    Outcome o;
    o.pass = pass && rep < 1e-12;
    o.metrics = {{"T0", T0},
                 {"x_alpha", xa},
                 {"uniform_worst_ratio", ratio[0]},
                 {"oscillation_worst_ratio", ratio[1]},
                 {"pvar_worst_ratio", ratio[2]},
                 {"representation_defect", rep}};
    o.detail = "T0 " + sci(T0) + ", worst ratios " + sci(ratio[0]) + "/" + sci(ratio[1]) + "/" + sci(ratio[2]) + " <= 1, repr " + sci(rep) + " < 1e-12";
    return o;
  }});

  out.push_back({8, "selection_qvar_certificate", 30.0, [](const fs::path& dir) {
    TimeSetMap F = make_time_map(parse_map_expr("two_point(c=0.5,s=0.3,omega=5,gamma=0.8,offset=1)"));
    const double declared = F.gamma_norm;
    F.gamma_norm = estimate_gamma_norm_on_grid(F, 12);
    const double q = 1.5 / F.gamma;
    bool pass = true;
    double worst_memb = 0.0, worst_ratio = 0.0;
    std::string table = "level,q_variation,bound,membership_residual,step_ratio,certificate\n";
    for (int m = 8; m <= 12; ++m) {
      SelectionResult r = select_path(F, scalar(0.0), m);
      SelectionCertificate c = certify_selection(r, F, q);
      pass = pass && c.membership_residual < 1e-10 && c.q_variation <= c.bound_rhs;
      worst_memb = std::max(worst_memb, c.membership_residual);
      worst_ratio = std::max(worst_ratio, c.q_variation / c.bound_rhs);
      table += std::to_string(m) + "," + fmt17(c.q_variation) + "," + fmt17(c.bound_rhs) + "," + fmt17(c.membership_residual) + "," +
               fmt17(c.step_ratio) + "," + (c.pass() ? "pass" : "fail") + "\n";
    }
    write_text(dir / "certificates.csv", table);
    Outcome o;
    o.pass = pass;
    o.metrics = {{"gamma_norm_measured", F.gamma_norm}, {"gamma_norm_declared", declared}, {"q", q},
                 {"worst_membership", worst_memb}, {"worst_qvar_ratio", worst_ratio}};
    o.detail = "membership " + sci(worst_memb) + " < 1e-10, qvar/bound " + sci(worst_ratio) + " <= 1";
    return o;
  }});

  auto rdi_case = [&fx](const std::string& map, RdiMode mode, const fs::path& dir, json& m) {
    const RoughPath& X = fx.fbm_h045();
    OneForm G = make_one_form(parse_map_expr("bounded_rational(a=0.1)"));
    SetValuedMap F = make_state_map(parse_map_expr(map));
    RdiConfig cfg;
    cfg.xi = scalar(0.5);
    cfg.alpha = 0.45;
    cfg.beta = 0.4;
    cfg.L = 0.25;
    cfg.M = 1.0;
    cfg.fp_tol = 1e-10;
    cfg.mode = mode;
    RdiSolution sol = rdi_fixed_point(F, G, X, cfg);
    m = {{"map", map},
         {"certified", sol.certified},
         {"fixed_point_residual", sol.fixed_point_residual},
         {"inclusion_residual", sol.inclusion_residual},
         {"iterations", sol.iterations},
         {"T_star", sol.T_star},
         {"cone_violations", sol.cone_violations}};
    write_path_csv(dir / "z.csv", sol.z.y, "z");
    write_path_csv(dir / "velocity.csv", sol.velocity, "w");
    return sol;
  };

  out.push_back({9, "rdi_lsc_two_point", 120.0, [rdi_case](const fs::path& dir) {
    json m;
    RdiSolution sol = rdi_case("two_point(a=0,lo=-0.2,hi=0.2)", RdiMode::lsc, dir, m);
    bool in_cloud = true;
    for (std::size_t i = 0; i + 1 < sol.velocity.size(); ++i) {
      double w = sol.velocity.values(0, static_cast<Eigen::Index>(i));
      in_cloud = in_cloud && (w == -0.2 || w == 0.2);
    }
    m["velocity_in_cloud"] = in_cloud;
    write_json(dir / "rdi.json", m);
    Outcome o;
    o.metrics = m;
    o.pass = sol.certified && sol.fixed_point_residual < 1e-6 && sol.inclusion_residual < 1e-6 && sol.T_star >= 1.0 / 8.0 && in_cloud;
    o.detail = "fp " + sci(sol.fixed_point_residual) + ", incl " + sci(sol.inclusion_residual) + " < 1e-6, T* " + sci(sol.T_star);
    return o;
  }});

  out.push_back({10, "rdi_usc_box", 120.0, [rdi_case, &fx](const fs::path& dir) {
    json m, m0;
    RdiSolution sol = rdi_case("box(lo=-0.2,hi=0.2)", RdiMode::usc, dir / "box", m);
    RdiSolution zero = rdi_case("box(lo=0,hi=0)", RdiMode::usc, dir / "zero", m0);
    RdeResult rde = rde_solve(make_one_form(parse_map_expr("bounded_rational(a=0.1)")), fx.fbm_h045(), scalar(0.5));
    const double gap = zero.z.y.size() == rde.z.y.size() ? (zero.z.y.values - rde.z.y.values).cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
    json all = {{"box", m}, {"zero", m0}, {"zero_vs_rde", gap}};
    write_json(dir / "rdi.json", all);
    Outcome o;
    o.metrics = all;
    o.pass = sol.certified && sol.fixed_point_residual < 1e-6 && sol.inclusion_residual < 1e-6 && zero.certified && gap <= 1e-10;
    o.detail = "fp " + sci(sol.fixed_point_residual) + ", incl " + sci(sol.inclusion_residual) + " < 1e-6, {0} vs rde " + sci(gap) + " <= 1e-10";
    return o;
  }});

  out.push_back({11, "fbm_variance_and_reruns", 60.0, [](const fs::path& dir) {
    const int N = 10000;
    bool pass = true, identical = true;
    json rows = json::array();
    std::string detail;
    for (double H : {0.45, 0.8}) {
      FbmSampler smp(DyadicGrid(1.0, 6), H);
      std::vector<double> x1(N), again(N);
      for (int i = 0; i < N; ++i) {
        NormalStream ns(1000 + static_cast<std::uint64_t>(i));
        Vec v = smp.sample_component(ns);
        x1[static_cast<std::size_t>(i)] = v[v.size() - 1];
      }
      for (int i = 0; i < N; ++i) {
        NormalStream ns(1000 + static_cast<std::uint64_t>(i));
        Vec v = smp.sample_component(ns);
        again[static_cast<std::size_t>(i)] = v[v.size() - 1];
      }
      identical = identical && x1 == again;
      double mean = 0.0;
      for (double v : x1) mean += v;
      mean /= N;
      double var = 0.0;
      for (double v : x1) var += (v - mean) * (v - mean);
      var /= N - 1;
      // standard error of the sample variance of a unit-variance Gaussian
      const double se = std::sqrt(2.0 / (N - 1));
      const double z = std::abs(var - 1.0) / se;
      pass = pass && z <= 3.0;
      rows.push_back({{"hurst", H}, {"variance", var}, {"standard_error", se}, {"z_score", z}});
      detail += "H=" + sci(H) + " z " + sci(z) + " ";
    }
    DriverSpec s;
    s.hurst = 0.45;
    s.seed = 99;
    s.level = 10;
    identical = identical && sample_fbm(s).values == sample_fbm(s).values;
    Outcome o;
    o.metrics = {{"samples", N}, {"rows", rows}, {"bit_identical_reruns", identical}};
    write_json(dir / "variance.json", o.metrics);
    o.pass = pass && identical;
    o.detail = detail + "<= 3, reruns identical " + (identical ? "yes" : "no");
    return o;
  }});

  return out;
}

inline void print(std::ostream* log, const Result& r) {
  if (!log) return;
  std::ostringstream t;
  t << std::fixed << std::setprecision(2) << r.seconds << " s / " << std::setprecision(0) << r.budget_seconds << " s";
  *log << (r.pass() ? "[PASS] " : "[FAIL] ") << std::setw(2) << std::setfill('0') << r.number << std::setfill(' ') << " " << r.id << ": "
       << r.outcome.detail << " (" << t.str() << (r.within_budget() ? "" : ", over budget") << ")\n";
  log->flush();
}

inline json summary_entry(const Result& r) {
  return {{"criterion", r.number}, {"id", r.id}, {"pass", r.outcome.pass}, {"metrics", r.outcome.metrics}};
}

// Files under root, relative, in sorted order.
inline std::vector<fs::path> tree(const fs::path& root) {
  std::vector<fs::path> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace detail

// Criteria 1-11 into <dir>/artifacts plus <dir>/artifacts/summary.json.
inline std::vector<Result> run_criteria(const fs::path& dir, std::ostream* log) {
  detail::Fixtures fx;
  std::vector<Result> results;
  json summary = json::array();
  for (const Criterion& c : detail::criteria(fx)) {
    Result r;
    r.number = c.number;
    r.id = c.id;
    r.budget_seconds = c.budget_seconds;
    const fs::path sub = dir / "artifacts" / c.id;
    fs::create_directories(sub);
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.outcome = c.run(sub);
    } catch (const std::exception& e) {
      r.outcome.pass = false;
      r.outcome.detail = std::string("error: ") + e.what();
      r.outcome.metrics = {{"error", e.what()}};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::print(log, r);
    summary.push_back(detail::summary_entry(r));
    results.push_back(std::move(r));
  }
  write_json(dir / "artifacts" / "summary.json", summary);
  return results;
}

struct SuiteReport {
  std::vector<Result> results;
  bool pass() const {
    return std::all_of(results.begin(), results.end(), [](const Result& r) { return r.pass(); });
  }
};

// Full suite. Criterion 12 reruns criteria 1-11 into <out>/rerun and
// compares the two artifact trees byte for byte.
inline SuiteReport run_suite(const fs::path& out, std::ostream* log) {
  std::error_code ec;
  fs::remove_all(out / "artifacts", ec);
  fs::remove_all(out / "rerun", ec);
  SuiteReport rep;
  rep.results = run_criteria(out, log);

  Result r;
  r.number = 12;
  r.id = "check_artifacts_byte_identical";
  r.budget_seconds = 300.0;
  auto t0 = std::chrono::steady_clock::now();
  try {
    run_criteria(out / "rerun", nullptr);
    auto a = detail::tree(out / "artifacts"), b = detail::tree(out / "rerun" / "artifacts");
    std::size_t differing = 0;
    for (const auto& f : a)
      if (!std::binary_search(b.begin(), b.end(), f) || read_text(out / "artifacts" / f) != read_text(out / "rerun" / "artifacts" / f)) ++differing;
    const bool same = a == b && differing == 0;
    r.outcome.pass = same && !a.empty();
    r.outcome.metrics = {{"files", a.size()}, {"differing", differing}, {"same_file_set", a == b}};
    r.outcome.detail = std::to_string(a.size()) + " files, " + std::to_string(differing) + " differ";
  } catch (const std::exception& e) {
    r.outcome.pass = false;
    r.outcome.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::print(log, r);
  rep.results.push_back(r);

  bool numeric = std::all_of(rep.results.begin(), rep.results.end(), [](const Result& x) { return x.outcome.pass; });
  json summary = {{"pass", numeric}, {"criteria", json::array()}};
  for (const auto& x : rep.results) summary["criteria"].push_back(detail::summary_entry(x));
  write_json(out / "summary.json", summary);
  return rep;
}

}  // namespace roughinc::acceptance
