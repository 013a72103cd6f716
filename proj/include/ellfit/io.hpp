#ifndef ELLFIT_IO_HPP_
#define ELLFIT_IO_HPP_

// Point-set CSV, ellipse / report / dataset JSON, and trace CSV.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "ellfit/conic.hpp"
#include "ellfit/datagen.hpp"
#include "ellfit/solver.hpp"

namespace ellfit {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to exactly `v`, fixed notation.
std::string format_decimal(double v);

/// One `x,y` pair per line; an optional `x,y` header; blank lines skipped.
/// Throws ParseError carrying the 1-based line number.
Points2d read_points_csv(std::istream& in);
Points2d read_points_csv_file(const std::string& path);
void write_points_csv(std::ostream& out, const Points2d& points);

Json ellipse_to_json(const Ellipse& e);
/// Requires the keys cx, cy, a, b, theta_rad.
Ellipse ellipse_from_json(const Json& j);
Ellipse read_ellipse_file(const std::string& path);

Json report_to_json(const FitReport& report);

/// One row per trace sample: iteration, A..G, the three residuals.
void write_trace_csv(std::ostream& out, const FitReport& report);

struct DatasetSpec {
  SynthSpec synth;
  double pepper_density = 0.0;
  std::optional<BoundingBox> pepper_box;
};

Json dataset_sidecar(const Dataset& data, const DatasetSpec& spec);

/// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_text_file(const std::string& path);
Json parse_json_file(const std::string& path);

}  // namespace ellfit

#endif  // ELLFIT_IO_HPP_
