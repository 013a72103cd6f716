#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"

#include "ellfit/errors.hpp"
#include "ellfit/io.hpp"

using namespace ellfit;

TEST_CASE("format_decimal round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, double(i % 9) - 4);
    const std::string s = format_decimal(v);
    CHECK(s.find('e') == std::string::npos);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_decimal(40.0) == "40");
  CHECK(format_decimal(0.5) == "0.5");
  CHECK(format_decimal(-0.0) == "-0");
  CHECK(format_decimal(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("point CSV round trip") {
  Points2d pts(2, 3);
  pts << 1.5, -2.25, 1e-7, 0.1, 3.0, -1234.5678;
  std::stringstream ss;
  write_points_csv(ss, pts);
  CHECK(ss.str().rfind("x,y\n", 0) == 0);
  const Points2d back = read_points_csv(ss);
  CHECK(back == pts);
}

TEST_CASE("point CSV parsing") {
  std::istringstream plain("1,2\n 3 , 4 \n\n5,6\r\n");
  const Points2d p = read_points_csv(plain);
  REQUIRE(p.cols() == 3);
  CHECK(p(0, 1) == 3);
  CHECK(p(1, 2) == 6);

  std::istringstream sci("x,y\n1e-3,+2.5E2\n");
  const Points2d q = read_points_csv(sci);
  CHECK(q(0, 0) == 1e-3);
  CHECK(q(1, 0) == 250);

  std::istringstream bad("x,y\n1,2\n3,abc\n");
  CHECK_THROWS_WITH_AS(read_points_csv(bad), "line 3: expected a number, got 'abc'", ParseError);

  std::istringstream one_field("1,2\n3\n");
  try {
    read_points_csv(one_field);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  std::istringstream three("1,2,3\n");
  CHECK_THROWS_AS(read_points_csv(three), ParseError);

  std::istringstream late_header("1,2\nx,y\n");
  CHECK_THROWS_AS(read_points_csv(late_header), ParseError);

  std::istringstream inf("inf,1\n");
  CHECK_THROWS_AS(read_points_csv(inf), ParseError);

  CHECK_THROWS_AS(read_points_csv_file("/nonexistent/points.csv"), std::runtime_error);
}

TEST_CASE("ellipse JSON") {
  const Ellipse e{1, -2, 3, 0.5, 0.25};
  const Json j = ellipse_to_json(e);
  CHECK(j.dump() == R"({"cx":1.0,"cy":-2.0,"a":3.0,"b":0.5,"theta_rad":0.25})");
  const Ellipse back = ellipse_from_json(j);
  CHECK(back.cx == e.cx);
  CHECK(back.theta == e.theta);
  CHECK_THROWS_AS(ellipse_from_json(Json{{"cx", 1}}), ParseError);
}

TEST_CASE("report JSON") {
  FitReport r;
  r.status = FitStatus::Converged;
  r.ellipse = Ellipse{0, 0, 2, 1, 0.5};
  r.alpha << 1, 2, 3, 4, 5, 6, 7;
  r.iterations = 42;
  r.residuals = {1e-7, 2e-8, 3e-9};
  const Json j = report_to_json(r);
  CHECK(j.at("converged") == true);
  CHECK(j.at("iterations") == 42);
  CHECK(j.at("alpha_tilde").size() == 7);
  CHECK(j.at("alpha_tilde")[6] == 7.0);
  CHECK(j.at("residuals").at("coupling") == 1e-7);
  CHECK(j.at("ellipse").at("a") == 2.0);
  CHECK(j.at("status") == "converged");

  r.status = FitStatus::NotAnEllipse;
  r.ellipse.reset();
  const Json k = report_to_json(r);
  CHECK(k.at("ellipse").is_null());
  CHECK(k.at("converged") == false);
}

TEST_CASE("trace CSV") {
  FitReport r;
  TraceSample s;
  s.iteration = 10;
  s.alpha << 1, 0, 1, 0, 0, -1, 0.5;
  s.residuals = {0.25, 0.5, 0.125};
  r.trace = {s, s};
  std::ostringstream out;
  write_trace_csv(out, r);
  CHECK(out.str() ==
        "iteration,A,B,C,D,E,F,G,res_coupling,res_norm,res_disc\n"
        "10,1,0,1,0,0,-1,0.5,0.25,0.5,0.125\n"
        "10,1,0,1,0,0,-1,0.5,0.25,0.5,0.125\n");
}

TEST_CASE("dataset sidecar") {
  Dataset d;
  d.truth = Ellipse{0, 0, 2, 1, 0.5};
  d.contaminated_indices = {3, 9};
  d.seed = 11;
  DatasetSpec spec;
  spec.synth.noise.level = 1.5;
  const Json j = dataset_sidecar(d, spec);
  CHECK(j.at("contaminated_indices") == Json::array({3, 9}));
  CHECK(j.at("seed") == 11);
  CHECK(j.at("truth").at("b") == 1.0);
  CHECK(j.at("spec").at("level") == 1.5);
  CHECK(j.at("spec").at("noise") == "laplacian");
}
