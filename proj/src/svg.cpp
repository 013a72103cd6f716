#include "ellfit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace ellfit {

namespace {

const char* const kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                "#ff7f0e"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, y0, x1, y1;
  double sx, sy, ox, oy;

  Eigen::Vector2d map(double x, double y) const {
    return {ox + (x - x0) * sx, oy + (y1 - y) * sy};
  }
};

Frame make_frame(const Points2d& points, const std::vector<LabeledEllipse>& fits,
                 const std::optional<Ellipse>& truth, const SvgOptions& opt) {
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  const auto grow = [&](double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (Eigen::Index i = 0; i < points.cols(); ++i) grow(points(0, i), points(1, i));
  const auto grow_ellipse = [&](const Ellipse& e) {
    // Axis-aligned extent of a rotated ellipse.
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    const double hx = std::hypot(e.a * c, e.b * s);
    const double hy = std::hypot(e.a * s, e.b * c);
    grow(e.cx - hx, e.cy - hy);
    grow(e.cx + hx, e.cy + hy);
  };
  for (const auto& f : fits) grow_ellipse(f.ellipse);
  if (truth) grow_ellipse(*truth);
  if (!std::isfinite(x0)) x0 = y0 = -1, x1 = y1 = 1;

  double w = x1 - x0, h = y1 - y0;
  if (!(w > 0)) w = 1;
  if (!(h > 0)) h = 1;
  x0 -= 0.05 * w;
  x1 += 0.05 * w;
  y0 -= 0.05 * h;
  y1 += 0.05 * h;
  w = x1 - x0;
  h = y1 - y0;

  // Equal scale on both axes, centered.
  const double scale = std::min(opt.width / w, opt.height / h);
  Frame f{x0, y0, x1, y1, scale, scale, 0, 0};
  f.ox = (opt.width - w * scale) / 2;
  f.oy = (opt.height - h * scale) / 2;
  return f;
}

std::string ellipse_path(const Ellipse& e, const Frame& f, int segments) {
  std::ostringstream d;
  for (int k = 0; k < segments; ++k) {
    const double t = 2 * std::numbers::pi * k / segments;
    const Eigen::Vector2d p = ellipse_point(e, t);
    const Eigen::Vector2d q = f.map(p.x(), p.y());
    d << (k == 0 ? "M" : " L") << num(q.x()) << ',' << num(q.y());
  }
  d << " Z";
  return d.str();
}

}  // namespace

std::string render_svg(const Points2d& points,
                       const std::vector<LabeledEllipse>& fits,
                       const std::optional<Ellipse>& truth,
                       const SvgOptions& opt) {
  const Frame f = make_frame(points, fits, truth, opt);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(opt.width)
      << "\" height=\"" << num(opt.height) << "\" viewBox=\"0 0 "
      << num(opt.width) << ' ' << num(opt.height) << "\">\n"
      << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  out << "  <g class=\"points\" fill=\"#333333\">\n";
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const Eigen::Vector2d q = f.map(points(0, i), points(1, i));
    out << "    <circle cx=\"" << num(q.x()) << "\" cy=\"" << num(q.y())
        << "\" r=\"" << num(opt.dot_radius) << "\"/>\n";
  }
  out << "  </g>\n";

  if (truth)
    out << "  <path class=\"truth\" d=\"" << ellipse_path(*truth, f, opt.segments)
        << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\""
           " stroke-dasharray=\"6 4\"/>\n";

  std::size_t colour = 0;
  for (const auto& fit : fits) {
    const char* stroke = kPalette[colour++ % std::size(kPalette)];
    out << "  <path class=\"fit\" data-label=\"" << escape(fit.label) << "\" d=\""
        << ellipse_path(fit.ellipse, f, opt.segments)
        << "\" fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"2\"><title>" << escape(fit.label)
        << "</title></path>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ellfit
