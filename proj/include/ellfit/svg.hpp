#ifndef ELLFIT_SVG_HPP_
#define ELLFIT_SVG_HPP_

// SVG overlay of a point set and fitted ellipses. The y axis points up and
// the view is the bounding box of everything drawn, padded by 5%.

#include <optional>
#include <string>
#include <vector>

#include "ellfit/conic.hpp"

namespace ellfit {

struct LabeledEllipse {
  std::string label;
  Ellipse ellipse;
};

struct SvgOptions {
  double width = 640.0;
  double height = 480.0;
  int segments = 180;
  double dot_radius = 2.0;
};

/// One dot per point, one `<path class="fit">` per entry of `fits`, and a
/// dashed `<path class="truth">` when `truth` is given.
std::string render_svg(const Points2d& points,
                       const std::vector<LabeledEllipse>& fits,
                       const std::optional<Ellipse>& truth = std::nullopt,
                       const SvgOptions& options = {});

}  // namespace ellfit

#endif  // ELLFIT_SVG_HPP_
