#pragma once

// Builtin set-valued maps and one-forms named by short expressions:
//
//   expr   := name | name "(" [ key "=" number { "," key "=" number } ] ")"
//
// State maps (scalar state z, scalar values):
//   singleton_sine(a=0.1, omega=1, b=0)   {a sin(omega z) + b}
//   two_point(a=0.05, lo=0, hi=0.05)      {a sin z + lo, a sin z + hi}
//   ball(c=0, r=0.1, a=0)                 [c + a sin z - r, c + a sin z + r]
//   box(lo=-0.2, hi=0.2, a=0)             [lo + a sin z, hi + a sin z]
//   hull(lo=-0.2, hi=0.2, a=0)            conv{lo + a sin z, hi + a sin z}
//
// Time maps on [0,1], with h(t) = c t^gamma + s |sin(omega t)|^gamma:
//   two_point(c=0.5, s=0, omega=1, gamma=0.8, offset=1)   {h, h + offset}
//   singleton_sine(c=0, s=0.5, omega=1, gamma=0.8)        {h}
//   ball(c, s, omega, gamma, r=0.1)                       ball around h
//   box(c, s, omega, gamma, lo=-0.1, hi=0.1)              [h + lo, h + hi]
//   hull(c, s, omega, gamma, lo=-0.1, hi=0.1)             conv{h + lo, h + hi}
//
// One-forms (scalar):
//   bounded_rational(a=0.1)  a / (1 + y^2)
//   linear(a=1)              a y
//   constant(c=1)            c
//   sine(a=1)                a sin y
//   zero                     0

#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "roughinc/rough.hpp"
#include "roughinc/sets.hpp"

namespace roughinc {

struct MapExpr {
  std::string name;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : params)
      if (!ok.count(k)) throw std::invalid_argument("'" + name + "' has no parameter '" + k + "'");
  }
};

inline MapExpr parse_map_expr(const std::string& text) {
  MapExpr e;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto ident = [&] {
    skip();
    std::size_t b = i;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
    if (b == i) throw std::invalid_argument("expected a name at position " + std::to_string(b) + " in '" + text + "'");
    return text.substr(b, i - b);
  };
  e.name = ident();
  skip();
  if (i == text.size()) return e;
  if (text[i] != '(') throw std::invalid_argument("expected '(' after '" + e.name + "'");
  ++i;
  skip();
  if (i < text.size() && text[i] == ')') {
    ++i;
  } else {
    while (true) {
      std::string key = ident();
      skip();
      if (i >= text.size() || text[i] != '=') throw std::invalid_argument("expected '=' after '" + key + "'");
      ++i;
      skip();
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text.substr(i), &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("expected a number for '" + key + "'");
      }
      i += used;
      if (!e.params.emplace(key, v).second) throw std::invalid_argument("parameter '" + key + "' given twice");
      skip();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == ')') {
        ++i;
        break;
      }
      throw std::invalid_argument("expected ',' or ')' in '" + text + "'");
    }
  }
  skip();
  if (i != text.size()) throw std::invalid_argument("trailing characters in '" + text + "'");
  return e;
}

inline SetValuedMap make_state_map(const MapExpr& e) {
  SetValuedMap f;
  f.value_dim = 1;
  f.gamma = 1.0;
  if (e.name == "singleton_sine") {
    e.allow_only({"a", "omega", "b"});
    double a = e.get("a", 0.1), w = e.get("omega", 1.0), b = e.get("b", 0.0);
    f.eval = [a, w, b](double, const Vec& z) -> SetValue { return make_cloud({scalar(a * std::sin(w * z[0]) + b)}); };
    f.gamma_norm = std::abs(a * w);
    f.sup_bound = std::abs(a) + std::abs(b);
  } else if (e.name == "two_point") {
    e.allow_only({"a", "lo", "hi"});
    double a = e.get("a", 0.05), lo = e.get("lo", 0.0), hi = e.get("hi", 0.05);
    f.eval = [a, lo, hi](double, const Vec& z) -> SetValue {
      double s = a * std::sin(z[0]);
      return make_cloud({scalar(s + lo), scalar(s + hi)});
    };
    f.gamma_norm = std::abs(a);
    f.sup_bound = std::abs(a) + std::max(std::abs(lo), std::abs(hi));
  } else if (e.name == "ball") {
    e.allow_only({"c", "r", "a"});
    double c = e.get("c", 0.0), r = e.get("r", 0.1), a = e.get("a", 0.0);
    f.eval = [c, r, a](double, const Vec& z) -> SetValue { return make_ball(scalar(c + a * std::sin(z[0])), r); };
    f.gamma_norm = std::abs(a);
    f.sup_bound = std::abs(c) + std::abs(a) + r;
  } else if (e.name == "box" || e.name == "hull") {
    e.allow_only({"lo", "hi", "a"});
    double lo = e.get("lo", -0.2), hi = e.get("hi", 0.2), a = e.get("a", 0.0);
    if (hi < lo) throw std::invalid_argument(e.name + ": hi < lo");
    if (e.name == "box") {
      f.eval = [lo, hi, a](double, const Vec& z) -> SetValue {
        double s = a * std::sin(z[0]);
        return make_box(scalar(lo + s), scalar(hi + s));
      };
    } else {
      f.eval = [lo, hi, a](double, const Vec& z) -> SetValue {
        double s = a * std::sin(z[0]);
        return make_hull({scalar(lo + s), scalar(hi + s)});
      };
    }
    f.gamma_norm = std::abs(a);
    f.sup_bound = std::max(std::abs(lo), std::abs(hi)) + std::abs(a);
  } else {
    throw std::invalid_argument("unknown set-valued map '" + e.name + "'");
  }
  return f;
}

inline TimeSetMap make_time_map(const MapExpr& e) {
  TimeSetMap f;
  f.value_dim = 1;
  double c = e.get("c", e.name == "two_point" ? 0.5 : 0.0);
  double s = e.get("s", e.name == "singleton_sine" ? 0.5 : 0.0);
  double w = e.get("omega", 1.0), g = e.get("gamma", 0.8);
  if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument(e.name + ": gamma must lie in (0,1]");
  f.gamma = g;
  // |a^g - b^g| <= |a-b|^g and the same for |sin|^g, so this bounds ||F||_g.
  f.gamma_norm = std::abs(c) + std::abs(s) * std::pow(std::abs(w), g);
  auto h = [c, s, w, g](double t) { return c * std::pow(t, g) + s * std::pow(std::abs(std::sin(w * t)), g); };
  if (e.name == "two_point") {
    e.allow_only({"c", "s", "omega", "gamma", "offset"});
    double off = e.get("offset", 1.0);
    f.eval = [h, off](double t) -> SetValue { return make_cloud({scalar(h(t)), scalar(h(t) + off)}); };
  } else if (e.name == "singleton_sine") {
    e.allow_only({"c", "s", "omega", "gamma"});
    f.eval = [h](double t) -> SetValue { return make_cloud({scalar(h(t))}); };
  } else if (e.name == "ball") {
    e.allow_only({"c", "s", "omega", "gamma", "r"});
    double r = e.get("r", 0.1);
    f.eval = [h, r](double t) -> SetValue { return make_ball(scalar(h(t)), r); };
  } else if (e.name == "box" || e.name == "hull") {
    e.allow_only({"c", "s", "omega", "gamma", "lo", "hi"});
    double lo = e.get("lo", -0.1), hi = e.get("hi", 0.1);
    if (hi < lo) throw std::invalid_argument(e.name + ": hi < lo");
    if (e.name == "box") f.eval = [h, lo, hi](double t) -> SetValue { return make_box(scalar(h(t) + lo), scalar(h(t) + hi)); };
    else f.eval = [h, lo, hi](double t) -> SetValue { return make_hull({scalar(h(t) + lo), scalar(h(t) + hi)}); };
  } else {
    throw std::invalid_argument("unknown time map '" + e.name + "'");
  }
  return f;
}

inline OneForm make_one_form(const MapExpr& e) {
  OneForm g;
  g.d = 1;
  g.l = 1;
  g.order = 2;
  g.gamma = 1.0;
  auto m1 = [](double v) { return Mat::Constant(1, 1, v); };
  if (e.name == "bounded_rational") {
    e.allow_only({"a"});
    double a = e.get("a", 0.1);
    g.value = [a, m1](const Vec& y) { return m1(a / (1.0 + y[0] * y[0])); };
    g.derivative = [a, m1](const Vec& y) {
      double u = 1.0 + y[0] * y[0];
      return m1(-2.0 * a * y[0] / (u * u));
    };
    g.sup_value = std::abs(a);
    // max |2 y / (1+y^2)^2| = 3 sqrt(3) / 8
    g.sup_derivative = std::abs(a) * 3.0 * std::sqrt(3.0) / 8.0;
  } else if (e.name == "linear") {
    e.allow_only({"a"});
    double a = e.get("a", 1.0);
    g.value = [a, m1](const Vec& y) { return m1(a * y[0]); };
    g.derivative = [a, m1](const Vec&) { return m1(a); };
    g.sup_derivative = std::abs(a);
  } else if (e.name == "constant") {
    e.allow_only({"c"});
    double c = e.get("c", 1.0);
    g.value = [c, m1](const Vec&) { return m1(c); };
    g.derivative = [m1](const Vec&) { return m1(0.0); };
    g.sup_value = std::abs(c);
    g.sup_derivative = 0.0;
  } else if (e.name == "sine") {
    e.allow_only({"a"});
    double a = e.get("a", 1.0);
    g.value = [a, m1](const Vec& y) { return m1(a * std::sin(y[0])); };
    g.derivative = [a, m1](const Vec& y) { return m1(a * std::cos(y[0])); };
    g.sup_value = std::abs(a);
    g.sup_derivative = std::abs(a);
  } else if (e.name == "zero") {
    e.allow_only({});
    g.value = [m1](const Vec&) { return m1(0.0); };
    g.derivative = [m1](const Vec&) { return m1(0.0); };
    g.sup_value = 0.0;
    g.sup_derivative = 0.0;
  } else {
    throw std::invalid_argument("unknown one-form '" + e.name + "'");
  }
  return g;
}

}  // namespace roughinc
