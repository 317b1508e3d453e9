#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "exradon/errors.hpp"

namespace exradon {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double xx, double yy) : x(xx), y(yy) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  friend Vec2 operator*(double s, Vec2 v) { return v * s; }

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  /// Rotation by +pi/2.
  Vec2 perp() const { return {-y, x}; }
  Vec2 normalized() const;
  double angle() const { return std::atan2(y, x); }
};

/// 2x2 matrix, row-major: [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 rotation(double phi) {
    const double cs = std::cos(phi), sn = std::sin(phi);
    return {cs, -sn, sn, cs};
  }
  static Mat2 diag(double sx, double sy) { return {sx, 0.0, 0.0, sy}; }
  static Mat2 from_columns(Vec2 c0, Vec2 c1) { return {c0.x, c1.x, c0.y, c1.y}; }

  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  double det() const { return a * d - b * c; }
  Mat2 transposed() const { return {a, c, b, d}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 inverse() const;
};

/// Canonicalizes an angle to [0, 2*pi).
double wrap_angle(double theta);

/// Unit direction omega = (cos theta, sin theta) with the perpendicular
/// omega_perp = (-sin theta, cos theta), i.e. omega rotated by +pi/2.
class Direction {
 public:
  explicit Direction(double theta) : theta_(wrap_angle(theta)) {}

  double theta() const { return theta_; }
  Vec2 omega() const { return {std::cos(theta_), std::sin(theta_)}; }
  Vec2 omega_perp() const { return {-std::sin(theta_), std::cos(theta_)}; }
  Direction opposite() const { return Direction(theta_ + kPi); }

 private:
  double theta_;
};

/// Oriented line {x : <x, omega> = p}, parameterized as x(u) = p*omega + u*omega_perp.
/// l(omega, p) and l(-omega, -p) share the point set with opposite orientation.
struct Line {
  Direction dir;
  double offset = 0.0;

  Line(Direction d, double p) : dir(d), offset(p) {}
  Line(double theta, double p) : dir(theta), offset(p) {}

  Vec2 point_at(double u) const { return dir.omega() * offset + dir.omega_perp() * u; }
  Line reversed() const { return Line(dir.opposite(), -offset); }
};

/// Closed half-plane <x, normal> <= offset with unit normal.
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;

  HalfPlane(Vec2 n, double c);
  double signed_violation(Vec2 x) const { return x.dot(normal) - offset; }
};

enum class RegionClass { Compact, Parabolic, Hyperbolic, ContainsLine };

std::string to_string(RegionClass c);

/// Closed convex region given as a finite intersection of half-planes.
/// Smooth holes are approximated by supporting half-planes; the predicates
/// below only need the avoid/intersect decision, which is exact for
/// polyhedral regions.
class ConvexRegion {
 public:
  static ConvexRegion from_halfplanes(std::vector<HalfPlane> hps);

  // Presets.
  static ConvexRegion quadrant();
  /// Cone with apex at the origin spanning directions [axis - half_angle, axis + half_angle].
  static ConvexRegion wedge(double half_angle, double axis);
  /// {x >= 0, 0 <= y <= width}.
  static ConvexRegion halfstrip(double width);

  const std::vector<HalfPlane>& halfplanes() const { return hps_; }
  bool is_empty() const { return !feasible_.has_value(); }
  /// Any point of the region (possibly on the boundary).
  Vec2 feasible_point() const;

  /// Recession-cone classification. Throws Errc::EmptyRegion on an empty intersection.
  RegionClass classification() const;
  /// Extreme rays of the recession cone (empty for compact; one ray for
  /// parabolic; two for hyperbolic; the two line directions for contains-line).
  const std::vector<Vec2>& recession_directions() const;

 private:
  std::vector<HalfPlane> hps_;
  std::optional<Vec2> feasible_;
  RegionClass cls_ = RegionClass::Compact;
  std::vector<Vec2> recession_;

  void analyze();
};

/// True iff the line's point set meets the closed region; tangency counts.
bool line_intersects(const ConvexRegion& region, const Line& line);

RegionClass classify_region(const ConvexRegion& region);

/// Outward half-plane offset by eps (outer polyhedral approximation of the
/// distance-eps hull; corner defect <= eps*(1-cos(alpha/2)) for corner angle alpha).
ConvexRegion epsilon_offset(const ConvexRegion& region, double eps);

/// Invertible affine map A(x) = M*x + t.
struct AffineMap {
  Mat2 m;
  Vec2 t;
  Mat2 m_inv;
  double det = 1.0;

  static AffineMap make(Mat2 m, Vec2 t = {});
  static AffineMap identity() { return make(Mat2::identity()); }
  static AffineMap rotation(double phi) { return make(Mat2::rotation(phi)); }

  Vec2 apply(Vec2 x) const { return m.apply(x) + t; }
  Vec2 apply_inverse(Vec2 y) const { return m_inv.apply(y - t); }
  AffineMap inverse() const;
  /// Composition (this o other): x -> this(other(x)).
  AffineMap compose(const AffineMap& other) const;
};

/// Tie-break for the contained half-line used by normalizing_affine on
/// hyperbolic regions (the recession cone has two extreme rays).
enum class HalfLineChoice { First, Second };

/// Affine map sending a contained boundary half-line h of an unbounded region
/// onto the positive x1 axis and a support line at h's endpoint onto the x2
/// axis; the image of the region lies in {x1 >= 0}.
/// Throws Errc::NotNormalizable for compact or line-containing regions.
AffineMap normalizing_affine(const ConvexRegion& region,
                             HalfLineChoice choice = HalfLineChoice::First);

/// Image line A(l): refit from two mapped points; the normal is oriented
/// toward the image of the original positive-omega side.
Line transport_line(const AffineMap& map, const Line& line);

/// L(Omega, p0): all lines l(omega, p) with theta in the open window and p > p0.
class ExteriorScanSet {
 public:
  ExteriorScanSet(Direction omega0, double half_width, double p0);

  Direction omega0() const { return omega0_; }
  double half_width() const { return half_width_; }
  double p0() const { return p0_; }
  bool contains(const Line& line) const;
  bool contains_theta(double theta) const;

 private:
  Direction omega0_;
  double half_width_;
  double p0_;
};

/// 1-D feasibility of the half-plane constraints restricted to the ray
/// origin + u*dir: returns [lo, hi] (+-inf allowed) or nullopt when empty.
std::optional<std::pair<double, double>> interval_on_ray(
    const std::vector<HalfPlane>& hps, Vec2 origin, Vec2 dir);

}  // namespace exradon
