#include "exradon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exradon {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kConeTol = 1e-12;
constexpr double kDegenerateDet = 1e-12;

}  // namespace

Vec2 Vec2::normalized() const {
  const double n = norm();
  if (n < kDegenerateDet) raise(Errc::InvalidArgument, "cannot normalize near-zero vector");
  return {x / n, y / n};
}

Mat2 Mat2::inverse() const {
  const double dt = det();
  if (std::abs(dt) < kDegenerateDet) raise(Errc::DegenerateMap, "matrix determinant below 1e-12");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

HalfPlane::HalfPlane(Vec2 n, double c) {
  const double len = n.norm();
  if (len < kDegenerateDet) raise(Errc::InvalidArgument, "half-plane normal must be nonzero");
  normal = {n.x / len, n.y / len};
  offset = c / len;
}

std::string to_string(RegionClass c) {
  switch (c) {
    case RegionClass::Compact: return "compact";
    case RegionClass::Parabolic: return "parabolic";
    case RegionClass::Hyperbolic: return "hyperbolic";
    case RegionClass::ContainsLine: return "contains-line";
  }
  return "unknown";
}

std::optional<std::pair<double, double>> interval_on_ray(
    const std::vector<HalfPlane>& hps, Vec2 origin, Vec2 dir) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& hp : hps) {
    const double a = dir.dot(hp.normal);
    const double b = hp.offset - origin.dot(hp.normal);
    if (std::abs(a) <= kConeTol) {
      if (b < -kFeasTol) return std::nullopt;  // parallel and on the wrong side
      continue;
    }
    if (a > 0.0) {
      hi = std::min(hi, b / a);
    } else {
      lo = std::max(lo, b / a);
    }
  }
  if (lo > hi + kFeasTol) return std::nullopt;
  return std::make_pair(lo, hi);
}

ConvexRegion ConvexRegion::from_halfplanes(std::vector<HalfPlane> hps) {
  ConvexRegion r;
  r.hps_ = std::move(hps);
  r.analyze();
  return r;
}

ConvexRegion ConvexRegion::quadrant() {
  return from_halfplanes({HalfPlane({-1.0, 0.0}, 0.0), HalfPlane({0.0, -1.0}, 0.0)});
}

ConvexRegion ConvexRegion::wedge(double half_angle, double axis) {
  if (half_angle <= 0.0 || half_angle >= kPi / 2.0)
    raise(Errc::InvalidArgument, "wedge half-angle must lie in (0, pi/2)");
  // Boundary rays at axis -+ half_angle; outward normals perpendicular to them.
  const double n1 = axis - half_angle - kPi / 2.0;
  const double n2 = axis + half_angle + kPi / 2.0;
  return from_halfplanes({HalfPlane({std::cos(n1), std::sin(n1)}, 0.0),
                          HalfPlane({std::cos(n2), std::sin(n2)}, 0.0)});
}

ConvexRegion ConvexRegion::halfstrip(double width) {
  if (width <= 0.0) raise(Errc::InvalidArgument, "halfstrip width must be positive");
  return from_halfplanes({HalfPlane({-1.0, 0.0}, 0.0), HalfPlane({0.0, -1.0}, 0.0),
                          HalfPlane({0.0, 1.0}, width)});
}

void ConvexRegion::analyze() {
  feasible_.reset();
  recession_.clear();

  // Feasibility: try boundary-pair vertices, per-constraint boundary points,
  // and the origin; for a nonempty polyhedron at least one candidate lies in it.
  std::vector<Vec2> candidates;
  candidates.emplace_back(0.0, 0.0);
  const size_t n = hps_.size();
  for (size_t i = 0; i < n; ++i) {
    candidates.push_back(hps_[i].normal * hps_[i].offset);
    for (size_t j = i + 1; j < n; ++j) {
      const Mat2 m{hps_[i].normal.x, hps_[i].normal.y, hps_[j].normal.x, hps_[j].normal.y};
      if (std::abs(m.det()) < 1e-10) continue;
      const Mat2 inv = m.inverse();
      candidates.push_back(inv.apply({hps_[i].offset, hps_[j].offset}));
    }
  }
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_pt;
  for (const auto& c : candidates) {
    double worst = 0.0;
    for (const auto& hp : hps_) worst = std::max(worst, hp.signed_violation(c));
    if (worst < best) {
      best = worst;
      best_pt = c;
    }
  }
  const double scale = 1.0 + best_pt.norm();
  if (best <= kFeasTol * scale) feasible_ = best_pt;

  // Recession cone {d : <d, n_i> <= 0}. Its extreme rays, if any, are
  // orthogonal to some constraint normal, so +-n_i.perp() exhausts them.
  std::vector<Vec2> cone_dirs;
  auto cone_feasible = [&](Vec2 d) {
    for (const auto& hp : hps_) {
      if (d.dot(hp.normal) > kConeTol) return false;
    }
    return true;
  };
  for (const auto& hp : hps_) {
    for (const Vec2 d : {hp.normal.perp(), -hp.normal.perp()}) {
      if (!cone_feasible(d)) continue;
      bool dup = false;
      for (const auto& e : cone_dirs) {
        if ((d - e).norm() < 1e-9) dup = true;
      }
      if (!dup) cone_dirs.push_back(d);
    }
  }
  if (hps_.empty()) {
    cls_ = RegionClass::ContainsLine;
    recession_ = {Vec2{1.0, 0.0}, Vec2{-1.0, 0.0}};
    return;
  }

  bool has_line = false;
  for (const auto& d : cone_dirs) {
    if (cone_feasible(-d)) {
      has_line = true;
      recession_ = {d, -d};
      break;
    }
  }
  if (has_line) {
    cls_ = RegionClass::ContainsLine;
  } else if (cone_dirs.empty()) {
    cls_ = RegionClass::Compact;
  } else if (cone_dirs.size() == 1) {
    cls_ = RegionClass::Parabolic;
    recession_ = cone_dirs;
  } else {
    // Wedge: order the two extreme rays so the cone runs CCW from first to second.
    Vec2 r1 = cone_dirs.front(), r2 = cone_dirs.back();
    double width = 0.0;
    for (size_t i = 0; i < cone_dirs.size(); ++i) {
      for (size_t j = 0; j < cone_dirs.size(); ++j) {
        const double w = wrap_angle(cone_dirs[j].angle() - cone_dirs[i].angle());
        if (w < kPi && w > width && cone_feasible((cone_dirs[i] + cone_dirs[j]).normalized())) {
          width = w;
          r1 = cone_dirs[i];
          r2 = cone_dirs[j];
        }
      }
    }
    cls_ = RegionClass::Hyperbolic;
    recession_ = {r1, r2};
  }
}

Vec2 ConvexRegion::feasible_point() const {
  if (!feasible_) raise(Errc::EmptyRegion, "region is empty");
  return *feasible_;
}

RegionClass ConvexRegion::classification() const {
  if (!feasible_) raise(Errc::EmptyRegion, "cannot classify an empty region");
  return cls_;
}

const std::vector<Vec2>& ConvexRegion::recession_directions() const {
  if (!feasible_) raise(Errc::EmptyRegion, "cannot classify an empty region");
  return recession_;
}

RegionClass classify_region(const ConvexRegion& region) { return region.classification(); }

bool line_intersects(const ConvexRegion& region, const Line& line) {
  if (region.halfplanes().empty())
    raise(Errc::InvalidArgument, "line_intersects needs at least one half-plane");
  if (region.is_empty()) return false;
  const Vec2 origin = line.dir.omega() * line.offset;
  return interval_on_ray(region.halfplanes(), origin, line.dir.omega_perp()).has_value();
}

ConvexRegion epsilon_offset(const ConvexRegion& region, double eps) {
  if (eps <= 0.0) raise(Errc::InvalidArgument, "epsilon_offset requires eps > 0");
  std::vector<HalfPlane> out;
  out.reserve(region.halfplanes().size());
  for (const auto& hp : region.halfplanes()) out.emplace_back(hp.normal, hp.offset + eps);
  return ConvexRegion::from_halfplanes(std::move(out));
}

AffineMap AffineMap::make(Mat2 m, Vec2 t) {
  const double dt = m.det();
  if (std::abs(dt) < kDegenerateDet) raise(Errc::DegenerateMap, "affine map determinant below 1e-12");
  AffineMap a;
  a.m = m;
  a.t = t;
  a.m_inv = m.inverse();
  a.det = dt;
  return a;
}

AffineMap AffineMap::inverse() const { return make(m_inv, -m_inv.apply(t)); }

AffineMap AffineMap::compose(const AffineMap& other) const {
  return make(m * other.m, m.apply(other.t) + t);
}

AffineMap normalizing_affine(const ConvexRegion& region, HalfLineChoice choice) {
  const RegionClass cls = region.classification();
  if (cls == RegionClass::Compact)
    raise(Errc::NotNormalizable, "compact region has no contained half-line");
  if (cls == RegionClass::ContainsLine)
    raise(Errc::NotNormalizable, "region containing a line is not normalizable");

  const auto& rays = region.recession_directions();
  const Vec2 d = (cls == RegionClass::Parabolic || choice == HalfLineChoice::First)
                     ? rays.front()
                     : rays.back();

  // Support line: the most transversal constraint relative to the half-line
  // direction (d lies in the recession cone, so <d, n> <= 0 for all normals).
  const auto& hps = region.halfplanes();
  int support = -1;
  double best = -kConeTol;
  for (size_t i = 0; i < hps.size(); ++i) {
    const double a = d.dot(hps[i].normal);
    if (a < best) {
      best = a;
      support = static_cast<int>(i);
    }
  }
  if (support < 0)
    raise(Errc::NotNormalizable, "no support line transversal to the contained half-line");

  // Endpoint of h: a region point on the chosen support boundary line.
  const HalfPlane& s = hps[static_cast<size_t>(support)];
  Vec2 s_dir = s.normal.perp();
  const Vec2 s_origin = s.normal * s.offset;
  const auto seg = interval_on_ray(hps, s_origin, s_dir);
  if (!seg) raise(Errc::NotNormalizable, "support boundary does not touch the region");
  const auto [lo, hi] = *seg;
  double tt = 0.0;
  const bool lo_fin = std::isfinite(lo), hi_fin = std::isfinite(hi);
  if (lo_fin && hi_fin) {
    tt = 0.5 * (lo + hi);
  } else if (lo_fin) {
    tt = lo;
  } else if (hi_fin) {
    tt = hi;
  } else {
    raise(Errc::NotNormalizable, "support boundary lies inside the region");
  }
  const Vec2 x = s_origin + s_dir * tt;

  // M maps d -> e1 and the support direction -> e2; pick the support sign for
  // a positively oriented frame. The region image then lies in {x1 >= 0}.
  if (d.cross(s_dir) < 0.0) s_dir = -s_dir;
  const Mat2 frame = Mat2::from_columns(d, s_dir);
  const Mat2 m = frame.inverse();
  return AffineMap::make(m, -m.apply(x));
}

Line transport_line(const AffineMap& map, const Line& line) {
  if (std::abs(map.det) < kDegenerateDet) raise(Errc::DegenerateMap, "degenerate affine map");
  const Vec2 y0 = map.apply(line.point_at(0.0));
  const Vec2 y1 = map.apply(line.point_at(1.0));
  const Vec2 tangent = (y1 - y0).normalized();
  Vec2 normal = tangent.perp();
  // Orient the normal toward the image of the original positive-omega side.
  const Vec2 probe = map.apply(line.point_at(0.0) + line.dir.omega());
  if ((probe - y0).dot(normal) < 0.0) normal = -normal;
  const double theta = std::atan2(normal.y, normal.x);
  return Line(Direction(theta), y0.dot(normal));
}

ExteriorScanSet::ExteriorScanSet(Direction omega0, double half_width, double p0)
    : omega0_(omega0), half_width_(half_width), p0_(p0) {
  if (half_width <= 0.0 || half_width > kPi)
    raise(Errc::InvalidArgument, "scan window half-width must lie in (0, pi]");
  if (p0 <= 0.0) raise(Errc::InvalidArgument, "scan set requires p0 > 0");
}

bool ExteriorScanSet::contains_theta(double theta) const {
  double delta = wrap_angle(theta - omega0_.theta());
  if (delta > kPi) delta -= kTwoPi;
  return std::abs(delta) < half_width_;
}

bool ExteriorScanSet::contains(const Line& line) const {
  return line.offset > p0_ && contains_theta(line.dir.theta());
}

}  // namespace exradon
