#ifndef ELLFIT_CONIC_HPP_
#define ELLFIT_CONIC_HPP_

// Ellipse representations: geometric {cx, cy, a, b, theta}, algebraic
// [A, B, C, D, E, F] for A x^2 + B xy + C y^2 + D x + E y + F = 0, and the
// slack-augmented 7-vector [A, B, C, D, E, F, G] used by the fitter.

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "ellfit/errors.hpp"

namespace ellfit {

template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Vector7 = Eigen::Matrix<Scalar, 7, 1>;
template <typename Scalar>
using Matrix7 = Eigen::Matrix<Scalar, 7, 7>;

/// Algebraic conic coefficients [A, B, C, D, E, F].
template <typename Scalar>
using AlgebraicConic = Vector6<Scalar>;
/// Conic coefficients followed by the discriminant slack G.
template <typename Scalar>
using AugmentedConic = Vector7<Scalar>;
/// Monomial lift [x^2, xy, y^2, x, y, 1, 0] of a point.
template <typename Scalar>
using LiftedPoint = Vector7<Scalar>;

/// Point sets are stored column-wise, one (x, y) per column.
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
template <typename Scalar>
using DesignMatrix = Eigen::Matrix<Scalar, 7, Eigen::Dynamic>;

using Points2d = Points<double>;

template <typename Scalar>
struct GeometricEllipse {
  Scalar cx{0};
  Scalar cy{0};
  Scalar a{1};
  Scalar b{1};
  Scalar theta{0};  // counter-clockwise, radians
};

using Ellipse = GeometricEllipse<double>;

/// Wrapped distance between two ellipse orientations (period pi).
template <typename Scalar>
Scalar angle_distance(Scalar t1, Scalar t2) {
  using std::abs;
  using std::fmod;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar d = fmod(abs(t1 - t2), pi);
  return d < pi - d ? d : pi - d;
}

/// Maps theta into [-pi/2, pi/2).
template <typename Scalar>
Scalar wrap_orientation(Scalar theta) {
  using std::floor;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar t = theta - pi * floor((theta + pi / 2) / pi);
  if (t >= pi / 2) t -= pi;
  if (t < -pi / 2) t += pi;
  return t;
}

/// Enforces a >= b and theta in [-pi/2, pi/2).
template <typename Scalar>
GeometricEllipse<Scalar> canonicalize(GeometricEllipse<Scalar> e) {
  if (e.a < e.b) {
    std::swap(e.a, e.b);
    e.theta += std::numbers::pi_v<Scalar> / 2;
  }
  e.theta = wrap_orientation(e.theta);
  return e;
}

/// Componentwise equality of two ellipses as point sets: axes may be swapped
/// together with a quarter turn, and orientation is compared modulo pi.
template <typename Scalar>
Scalar ellipse_distance(const GeometricEllipse<Scalar>& x,
                        const GeometricEllipse<Scalar>& y) {
  using std::abs;
  using std::max;
  const auto p = canonicalize(x);
  const auto q = canonicalize(y);
  Scalar d = max({abs(p.cx - q.cx), abs(p.cy - q.cy), abs(p.a - q.a),
                  abs(p.b - q.b)});
  // Orientation is meaningless for circles.
  if (abs(p.a - p.b) > Scalar(1e-9) || abs(q.a - q.b) > Scalar(1e-9))
    d = max(d, angle_distance(p.theta, q.theta));
  return d;
}

/// Raw coefficients of the implicit equation, without normalization (F
/// carries the "-1" of the canonical form).
template <typename Scalar>
AlgebraicConic<Scalar> conic_coefficients(const GeometricEllipse<Scalar>& e) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(e.theta), s = sin(e.theta);
  const Scalar ia = Scalar(1) / (e.a * e.a), ib = Scalar(1) / (e.b * e.b);
  const Scalar cx = e.cx, cy = e.cy;
  AlgebraicConic<Scalar> k;
  k(0) = c * c * ia + s * s * ib;
  k(1) = 2 * c * s * (ia - ib);
  k(2) = s * s * ia + c * c * ib;
  k(3) = (-2 * cx * c * c - 2 * cy * s * c) * ia +
         (-2 * cx * s * s + 2 * cy * s * c) * ib;
  k(4) = (-2 * cy * s * s - 2 * cx * s * c) * ia +
         (-2 * cy * c * c + 2 * cx * s * c) * ib;
  const Scalar p = cx * c + cy * s, q = cx * s - cy * c;
  k(5) = p * p * ia + q * q * ib - 1;
  return k;
}

/// Unit-norm sign convention: A > 0, or the first nonzero entry positive.
template <typename Derived>
void fix_sign(Eigen::MatrixBase<Derived>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) > 0) return;
    if (v(i) < 0) {
      v = -v;
      return;
    }
  }
}

template <typename Scalar>
AlgebraicConic<Scalar> algebraic_from_geometric(
    const GeometricEllipse<Scalar>& e) {
  AlgebraicConic<Scalar> k = conic_coefficients(e);
  k.normalize();
  fix_sign(k);
  return k;
}

/// B^2 - 4AC. Negative for ellipses, zero for parabolas, positive for
/// hyperbolas. Accepts the 6- or 7-vector form.
template <typename Derived>
typename Derived::Scalar discriminant(const Eigen::MatrixBase<Derived>& k) {
  return k(1) * k(1) - 4 * k(0) * k(2);
}

/// Recovers the geometric parameters of an ellipse from its coefficients
/// (any nonzero scale, either sign; a 7-vector's slack entry is ignored).
/// Throws NotAnEllipse when B^2 - 4AC >= 0 and DegenerateConic when the
/// conic is empty or a single point.
template <typename Derived>
GeometricEllipse<typename Derived::Scalar> geometric_from_algebraic(
    const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  using std::atan2;
  using std::abs;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar A = k(0), B = k(1), C = k(2), D = k(3), E = k(4), F = k(5);
  const Scalar disc = B * B - 4 * A * C;
  if (!(disc < 0)) throw NotAnEllipse(double(disc));

  Scalar theta = 0;
  if (abs(B) >= Scalar(1e-12) || abs(A - C) >= Scalar(1e-12))
    theta = atan2(B, A - C) / 2;

  Eigen::Matrix<Scalar, 2, 2> quad;
  quad << A, B / 2, B / 2, C;
  Eigen::Matrix<Scalar, 2, 2> center_sys;
  center_sys << -2 * A, -B, -B, -2 * C;
  const Eigen::Matrix<Scalar, 2, 1> center =
      center_sys.inverse() * Eigen::Matrix<Scalar, 2, 1>(D, E);

  // (p - c)^T Q (p - c) = c^T Q c - F on the conic.
  const Scalar level = center.dot(quad * center) - F;
  const Scalar c = cos(theta), s = sin(theta);
  const Scalar along = A * c * c + B * s * c + C * s * s;
  const Scalar across = A * s * s - B * s * c + C * c * c;
  const Scalar ra = level / along, rb = level / across;
  if (!(ra > Scalar(1e-12)) || !(rb > Scalar(1e-12)))
    throw DegenerateConic(double(ra < rb ? ra : rb));

  GeometricEllipse<Scalar> e{center(0), center(1), sqrt(ra), sqrt(rb), theta};
  return canonicalize(e);
}

template <typename Scalar>
LiftedPoint<Scalar> lift_point(Scalar x, Scalar y) {
  LiftedPoint<Scalar> v;
  v << x * x, x * y, y * y, x, y, Scalar(1), Scalar(0);
  return v;
}

/// Stacks the lifted points column-wise into a 7 x N design matrix.
template <typename Derived>
DesignMatrix<typename Derived::Scalar> build_design(
    const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::RowsAtCompileTime == 2 ||
                    Derived::RowsAtCompileTime == Eigen::Dynamic,
                "points must be a 2 x N matrix");
  if (points.rows() != 2)
    throw std::invalid_argument("points must be a 2 x N matrix");
  if (points.cols() < 5) throw TooFewPoints(points.cols());
  DesignMatrix<Scalar> X(7, points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    X.col(i) = lift_point(points(0, i), points(1, i));
  return X;
}

/// x~^T alpha~ for a single point.
template <typename Derived>
typename Derived::Scalar algebraic_distance(
    const Eigen::MatrixBase<Derived>& alpha_tilde,
    typename Derived::Scalar x, typename Derived::Scalar y) {
  const auto lifted = lift_point(x, y);
  return lifted.head(alpha_tilde.size()).dot(alpha_tilde);
}

/// Phi = diag(1,1,1,1,1,1,0): alpha~^T Phi alpha~ = ||[A..F]||^2.
template <typename Scalar>
Matrix7<Scalar> phi_matrix() {
  Matrix7<Scalar> m = Matrix7<Scalar>::Identity();
  m(6, 6) = 0;
  return m;
}

/// Upper-left block of Theta acting on (A, B, C).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> lambda_block() {
  Eigen::Matrix<Scalar, 3, 3> m;
  m << 0, 0, -2, 0, 1, 0, -2, 0, 0;
  return m;
}

/// Theta: alpha~^T Theta alpha~ = B^2 - 4AC + G^2.
template <typename Scalar>
Matrix7<Scalar> theta_matrix() {
  Matrix7<Scalar> m = Matrix7<Scalar>::Zero();
  m.template topLeftCorner<3, 3>() = lambda_block<Scalar>();
  m(6, 6) = 1;
  return m;
}

template <typename Scalar>
struct ConstraintMatrices {
  Matrix7<Scalar> phi = phi_matrix<Scalar>();
  Matrix7<Scalar> theta = theta_matrix<Scalar>();
  Eigen::Matrix<Scalar, 3, 3> lambda = lambda_block<Scalar>();
};

/// Point on the boundary at parameter t.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> ellipse_point(const GeometricEllipse<Scalar>& e,
                                          Scalar t) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(e.theta), s = sin(e.theta);
  const Scalar px = e.a * cos(t), py = e.b * sin(t);
  return {e.cx + c * px - s * py, e.cy + s * px + c * py};
}

}  // namespace ellfit

#endif  // ELLFIT_CONIC_HPP_
