// Runs the ellfit executable end to end.

#include <sys/wait.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#ifndef ELLFIT_CLI
#error "ELLFIT_CLI must name the ellfit executable"
#endif

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("ellfit_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run ellfit(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = scratch() / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("'") + ELLFIT_CLI + "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

long line_count(const std::string& text) {
  long n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("synth then fit recovers the truth") {
  REQUIRE(ellfit("synth --level 0 --jitter 0 --seed 1 -o " + path("clean.csv")).code == 0);
  const Run fit = ellfit("fit " + path("clean.csv") + " --norm l1");
  CHECK(fit.code == 0);
  const Json j = Json::parse(fit.out);
  CHECK(j.at("converged") == true);
  CHECK(std::abs(j.at("ellipse").at("a").get<double>() - 2) < 1e-3);
  CHECK(std::abs(j.at("ellipse").at("b").get<double>() - 1) < 1e-3);
  CHECK(std::abs(j.at("ellipse").at("theta_rad").get<double>() - 0.5235987755982988) < 1e-3);
}

TEST_CASE("level 0 with jitter stays within the documented tolerance") {
  REQUIRE(ellfit("synth --level 0 --seed 2 -o " + path("jitter.csv")).code == 0);
  const Run fit = ellfit("fit " + path("jitter.csv") + " --norm l1 --svg " + path("jitter.svg") +
                         " --truth " + path("jitter.csv.json"));
  // The strict residual test is out of reach under jitter; exit code 2 says so.
  CHECK((fit.code == 0 || fit.code == 2));
  const Json j = Json::parse(fit.out);
  for (const auto& [key, want] : {std::pair{"cx", 0.0}, {"cy", 0.0}, {"a", 2.0}, {"b", 1.0}})
    CHECK(std::abs(j.at("ellipse").at(key).get<double>() - want) < 1e-3);
  const std::string svg = slurp(path("jitter.svg"));
  CHECK(svg.find("class=\"fit\"") != std::string::npos);
  CHECK(svg.find("class=\"truth\"") != std::string::npos);
}

TEST_CASE("too few points") {
  std::ofstream(path("four.csv")) << "x,y\n0,0\n1,0\n0,1\n1,1\n";
  const Run r = ellfit("fit " + path("four.csv"));
  CHECK(r.code != 0);
  CHECK(r.err.find("need at least 5 points") != std::string::npos);
}

TEST_CASE("malformed point file reports the line") {
  std::ofstream(path("broken.csv")) << "x,y\n0,0\n1,zero\n";
  const Run r = ellfit("fit " + path("broken.csv"));
  CHECK(r.code == 1);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("fit output is deterministic") {
  REQUIRE(ellfit("synth --level 0.5 --noise uniform --count 10 --seed 3 -o " + path("det.csv")).code == 0);
  const std::string args = "fit " + path("det.csv") + " --norm l0 --seed 7 --max-iters 20000";
  const Run a = ellfit(args);
  const Run b = ellfit(args);
  CHECK(a.code == 2);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("synth: experiment preset") {
  REQUIRE(ellfit("synth --preset exp1 --seed 4 -o " + path("exp1.csv")).code == 0);
  CHECK(line_count(slurp(path("exp1.csv"))) == 101);
  const Json side = Json::parse(slurp(path("exp1.csv.json")));
  CHECK(side.at("contaminated_indices").size() == 20);
  CHECK(side.at("seed") == 4);
  CHECK(side.at("truth").at("a") == 2.0);
}

TEST_CASE("synth: pepper") {
  REQUIRE(ellfit("synth --level 0 --pepper 0.001 --bbox 640x480 -o " + path("pepper.csv")).code == 0);
  CHECK(line_count(slurp(path("pepper.csv"))) == 1 + 100 + 307);
  CHECK(ellfit("synth --pepper 0.001 --bbox 640by480").code != 0);
  CHECK(ellfit("synth --pepper 2").code != 0);
}

TEST_CASE("synth: level 0 stays on the conic") {
  const Run r = ellfit("synth --level 0 --seed 9");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  const double c = std::cos(0.5235987755982988), s = std::sin(0.5235987755982988);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma)), y = std::stod(line.substr(comma + 1));
    const double u = c * x + s * y, v = -s * x + c * y;
    // Jitter std 1e-4; well inside 1e-3 in normalized radius.
    CHECK(std::abs(std::sqrt(u * u / 4 + v * v) - 1) < 1e-3);
  }
}

TEST_CASE("bench presets") {
  const Run e1 = ellfit("bench --preset exp1 --trials 1 --max-iters 50");
  REQUIRE(e1.code == 0);
  CHECK(line_count(e1.out) == 1 + 6 * 3);
  CHECK(e1.out.rfind("cell,estimator,mad_a,mad_b,mad_cx,mad_cy,mad_theta_deg,failures,trials\n", 0) == 0);

  const Run e3 = ellfit("bench --preset exp3 --trials 1 --max-iters 50 -o " + path("exp3.csv"));
  REQUIRE(e3.code == 0);
  const std::string csv = slurp(path("exp3.csv"));
  CHECK(csv.find("\n0,l0,") != std::string::npos);
  CHECK(csv.find("\n40,l2,") != std::string::npos);
}

TEST_CASE("bench config file") {
  std::ofstream(path("cfg.json")) << R"({"preset": "exp2", "trials_per_cell": 1,
    "sweep": {"kind": "uniform_level", "values": [0, 1.2], "count": 5},
    "estimators": ["l2"], "solver": {"max_iters": 100}})";
  const Run r = ellfit("bench --config " + path("cfg.json"));
  CHECK(r.code == 0);
  CHECK(line_count(r.out) == 3);

  std::ofstream(path("bad.json")) << "{\n  \"preset\": \"exp1\",\n  \"trials_per_cell\": ,\n}\n";
  const Run bad = ellfit("bench --config " + path("bad.json"));
  CHECK(bad.code != 0);
  CHECK(bad.err.find("line 3") != std::string::npos);
}

TEST_CASE("plot") {
  REQUIRE(ellfit("synth --level 0 --jitter 0 -o " + path("plot.csv")).code == 0);
  std::ofstream(path("fit_a.json")) << R"({"ellipse": {"cx": 0, "cy": 0, "a": 2, "b": 1, "theta_rad": 0.5}})";
  std::ofstream(path("fit_b.json")) << R"({"cx": 0.1, "cy": 0, "a": 2.1, "b": 1, "theta_rad": 0.4})";
  const Run r = ellfit("plot " + path("plot.csv") + " --fit " + path("fit_a.json") + " --fit " +
                       path("fit_b.json") + " --truth " + path("plot.csv.json"));
  REQUIRE(r.code == 0);
  long fits = 0;
  for (auto p = r.out.find("class=\"fit\""); p != std::string::npos; p = r.out.find("class=\"fit\"", p + 1))
    ++fits;
  CHECK(fits == 2);
  CHECK(r.out.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(ellfit("").code != 0);
  CHECK(ellfit("fit").code != 0);
  CHECK(ellfit("fit x.csv --norm l3").code != 0);
  CHECK(ellfit("fit /nonexistent.csv").code == 1);
}
