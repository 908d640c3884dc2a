#include <gtest/gtest.h>

#include <filesystem>

#include "roughinc/drivers.hpp"
#include "roughinc/io.hpp"
#include "roughinc/map_expr.hpp"

using namespace roughinc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("roughinc_test_io_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Csv, PathRoundTripIsExact) {
  DriverSpec s;
  s.hurst = 0.3;
  s.seed = 12;
  s.level = 7;
  s.dim = 3;
  Path x = sample_fbm(s);
  fs::path f = scratch("path") / "x.csv";
  write_path_csv(f, x);
  Path y = read_path_csv(f);
  EXPECT_EQ(y.times, x.times);
  EXPECT_EQ(y.values, x.values);
  ASSERT_TRUE(y.grid.has_value());
  EXPECT_EQ(y.grid->level(), 7);
  EXPECT_EQ(read_text(f).substr(0, 12), "t,x0,x1,x2\n0");
}

TEST(Csv, NonDyadicTimesHaveNoGrid) {
  fs::path f = scratch("nongrid") / "x.csv";
  write_text(f, "t,x\n0,0\n0.3,1\n1,0\n");
  Path y = read_path_csv(f);
  EXPECT_FALSE(y.grid.has_value());
  EXPECT_EQ(y.values(0, 1), 1.0);
}

TEST(Csv, RoughPathRoundTrip) {
  DriverSpec s;
  s.hurst = 0.4;
  s.seed = 1;
  s.level = 5;
  s.dim = 2;
  RoughPath r = lift_piecewise_linear(sample_fbm(s), 0.35);
  fs::path f = scratch("rough") / "r.csv";
  write_text(f, rough_path_csv(r));
  RoughPath q = read_rough_path_csv(f, 0.35);
  EXPECT_EQ(q.x.values, r.x.values);
  ASSERT_EQ(q.second.size(), r.second.size());
  for (std::size_t i = 0; i < r.second.size(); ++i) EXPECT_EQ(q.second[i], r.second[i]);
}

TEST(Csv, Errors) {
  EXPECT_THROW(read_path_csv("/nonexistent/dir/x.csv"), IoError);
  fs::path f = scratch("bad") / "x.csv";
  write_text(f, "t,x\n0,abc\n");
  EXPECT_THROW(read_path_csv(f), IoError);
  write_text(f, "t,x\n0,1,2\n");
  EXPECT_THROW(read_path_csv(f), IoError);
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(fmt17(v)), v);
  EXPECT_EQ(fmt17(0.5), "0.5");
}

TEST(Json, StableText) {
  nlohmann::json j = {{"b", 0.1}, {"a", 1}};
  EXPECT_EQ(json_text(j), json_text(nlohmann::json::parse(json_text(j))));
  EXPECT_EQ(json_text(j).back(), '\n');
}

TEST(MapExpr, Parsing) {
  MapExpr e = parse_map_expr(" two_point( a = 0.5 , lo=-1e-1,hi=2 ) ");
  EXPECT_EQ(e.name, "two_point");
  EXPECT_EQ(e.get("a", 0), 0.5);
  EXPECT_EQ(e.get("lo", 0), -0.1);
  EXPECT_EQ(e.get("missing", 7), 7);
  EXPECT_EQ(parse_map_expr("zero").name, "zero");
  EXPECT_EQ(parse_map_expr("zero()").params.size(), 0u);
  EXPECT_THROW(parse_map_expr("f(a=)"), std::invalid_argument);
  EXPECT_THROW(parse_map_expr("f(a=1,a=2)"), std::invalid_argument);
  EXPECT_THROW(parse_map_expr("f(a=1) x"), std::invalid_argument);
  EXPECT_THROW(make_state_map(parse_map_expr("two_point(b=1)")), std::invalid_argument);
  EXPECT_THROW(make_state_map(parse_map_expr("nothing")), std::invalid_argument);
  EXPECT_THROW(make_one_form(parse_map_expr("linear(c=1)")), std::invalid_argument);
}

TEST(MapExpr, OneFormDerivativesMatchDifferences) {
  for (const char* name : {"bounded_rational(a=0.1)", "linear(a=2)", "sine(a=0.5)", "constant(c=3)"}) {
    OneForm g = make_one_form(parse_map_expr(name));
    for (double y : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
      const double h = 1e-6;
      double fd = (g.value(scalar(y + h))(0, 0) - g.value(scalar(y - h))(0, 0)) / (2 * h);
      EXPECT_NEAR(g.derivative(scalar(y))(0, 0), fd, 1e-8) << name;
      EXPECT_LE(std::abs(g.derivative(scalar(y))(0, 0)), g.sup_derivative + 1e-15) << name;
    }
  }
}
