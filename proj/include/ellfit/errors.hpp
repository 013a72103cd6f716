#ifndef ELLFIT_ERRORS_HPP_
#define ELLFIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ellfit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotAnEllipse : public Error {
 public:
  explicit NotAnEllipse(double disc)
      : Error("conic is not an ellipse (B^2-4AC = " + std::to_string(disc) +
              ")"),
        discriminant(disc) {}
  double discriminant;
};

class DegenerateConic : public Error {
 public:
  explicit DegenerateConic(double radicand)
      : Error("degenerate conic (semi-axis radicand " +
              std::to_string(radicand) + ")") {}
};

class TooFewPoints : public Error {
 public:
  explicit TooFewPoints(long n)
      : Error("need at least 5 points, got " + std::to_string(n)) {}
};

class CountTooLarge : public Error {
 public:
  CountTooLarge(long count, long n)
      : Error("cannot contaminate " + std::to_string(count) + " of " +
              std::to_string(n) + " points") {}
};

class Diverged : public Error {
 public:
  explicit Diverged(long iteration)
      : Error("network state diverged at iteration " +
              std::to_string(iteration)),
        iteration(iteration) {}
  long iteration;
};

/// Malformed input file; `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  long line;
};

}  // namespace ellfit

#endif  // ELLFIT_ERRORS_HPP_
