#include "ellfit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

#include "ellfit/errors.hpp"

namespace ellfit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view text, long line) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size())
    throw ParseError("expected a number, got '" + std::string(text) + "'", line);
  if (!std::isfinite(v))
    throw ParseError("coordinate is not finite", line);
  return v;
}

}  // namespace

std::string format_decimal(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (res.ec != std::errc()) {
    // Only reachable for magnitudes beyond the buffer; fall back to shortest.
    const auto alt = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, alt.ptr);
  }
  return std::string(buf, res.ptr);
}

Points2d read_points_csv(std::istream& in) {
  std::vector<double> xs, ys;
  std::string raw;
  long line = 0;
  bool seen_content = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos)
      throw ParseError("expected 'x,y'", line);
    const auto first = trim(text.substr(0, comma));
    const auto second = trim(text.substr(comma + 1));
    if (!seen_content && first == "x" && second == "y") {
      seen_content = true;
      continue;
    }
    seen_content = true;
    if (second.find(',') != std::string_view::npos)
      throw ParseError("expected exactly two fields", line);
    xs.push_back(parse_field(first, line));
    ys.push_back(parse_field(second, line));
  }
  if (in.bad()) throw ParseError("read error", line);
  Points2d pts(2, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts(0, Eigen::Index(i)) = xs[i];
    pts(1, Eigen::Index(i)) = ys[i];
  }
  return pts;
}

Points2d read_points_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_points_csv(in);
}

void write_points_csv(std::ostream& out, const Points2d& points) {
  out << "x,y\n";
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    out << format_decimal(points(0, i)) << ',' << format_decimal(points(1, i))
        << '\n';
}

Json ellipse_to_json(const Ellipse& e) {
  return Json{{"cx", e.cx}, {"cy", e.cy}, {"a", e.a}, {"b", e.b},
              {"theta_rad", e.theta}};
}

Ellipse ellipse_from_json(const Json& j) {
  Ellipse e;
  try {
    e.cx = j.at("cx").get<double>();
    e.cy = j.at("cy").get<double>();
    e.a = j.at("a").get<double>();
    e.b = j.at("b").get<double>();
    e.theta = j.at("theta_rad").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("ellipse record: ") + ex.what(), 0);
  }
  return e;
}

Ellipse read_ellipse_file(const std::string& path) {
  const Json j = parse_json_file(path);
  // A dataset sidecar carries the ellipse under "truth".
  if (j.is_object() && j.contains("truth") && !j.contains("cx"))
    return ellipse_from_json(j.at("truth"));
  return ellipse_from_json(j);
}

Json report_to_json(const FitReport& report) {
  Json j;
  j["ellipse"] = report.ellipse ? ellipse_to_json(*report.ellipse) : Json(nullptr);
  Json alpha = Json::array();
  for (int k = 0; k < 7; ++k) alpha.push_back(report.alpha(k));
  j["alpha_tilde"] = alpha;
  j["iterations"] = report.iterations;
  j["residuals"] = Json{{"coupling", report.residuals.coupling},
                        {"norm", report.residuals.norm},
                        {"disc", report.residuals.disc}};
  j["converged"] = report.converged();
  j["status"] = std::string(to_string(report.status));
  if (!report.message.empty()) j["message"] = report.message;
  return j;
}

void write_trace_csv(std::ostream& out, const FitReport& report) {
  out << "iteration,A,B,C,D,E,F,G,res_coupling,res_norm,res_disc\n";
  for (const auto& s : report.trace) {
    out << s.iteration;
    for (int k = 0; k < 7; ++k) out << ',' << format_decimal(s.alpha(k));
    out << ',' << format_decimal(s.residuals.coupling) << ','
        << format_decimal(s.residuals.norm) << ','
        << format_decimal(s.residuals.disc) << '\n';
  }
}

Json dataset_sidecar(const Dataset& data, const DatasetSpec& spec) {
  Json j;
  j["truth"] = data.truth ? ellipse_to_json(*data.truth) : Json(nullptr);
  j["contaminated_indices"] = data.contaminated_indices;
  j["seed"] = data.seed;
  Json s;
  s["n_points"] = spec.synth.n_points;
  s["jitter_variance"] = spec.synth.jitter_variance;
  s["noise"] = std::string(to_string(spec.synth.noise.kind));
  s["level"] = spec.synth.noise.level;
  s["count"] = spec.synth.noise.count;
  s["noise_scale_convention"] = std::string(to_string(spec.synth.noise.convention));
  s["pepper_density"] = spec.pepper_density;
  if (spec.pepper_box) {
    const auto& b = *spec.pepper_box;
    s["pepper_box"] = Json{{"x0", b.x0}, {"y0", b.y0}, {"width", b.width},
                           {"height", b.height}};
  }
  j["spec"] = s;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is a 1-based offset; report the line it falls on.
    long line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < upto; ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(path + ": " + e.what(), line);
  }
}

}  // namespace ellfit
