#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace latpush {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 perp() const { return {-y, x}; }

  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
};

// normalize to (-pi, pi]
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Planar rigid transform. Angle is kept in (-pi, pi] at every construction
// so poses have one canonical representation and compare cleanly.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  static Pose2 identity() { return {}; }

  Vec2 translation() const { return {x, y}; }

  Vec2 apply(const Vec2& p) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {x + c * p.x - s * p.y, y + s * p.x + c * p.y};
  }

  Vec2 rotate(const Vec2& v) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
  }
};

inline Pose2 compose(const Pose2& a, const Pose2& b) {
  const Vec2 t = a.apply({b.x, b.y});
  return Pose2(t.x, t.y, a.theta + b.theta);
}

inline Pose2 invert(const Pose2& a) {
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return Pose2(-(c * a.x + s * a.y), -(-s * a.x + c * a.y), -a.theta);
}

// Convex polygon, counter-clockwise vertices, meters.
struct Polygon {
  std::vector<Vec2> vertices;

  Polygon() = default;
  explicit Polygon(std::vector<Vec2> v) : vertices(std::move(v)) {}

  static Polygon rect(double x0, double y0, double x1, double y1) {
    return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  }

  // oriented box spanning segment [a, b] with the given total width
  static Polygon capsule_box(const Vec2& a, const Vec2& b, double width) {
    const Vec2 d = (b - a).normalized();
    const Vec2 n = d.perp() * (0.5 * width);
    return Polygon({a - n, b - n, b + n, a + n});
  }

  std::size_t size() const { return vertices.size(); }

  Polygon transformed(const Pose2& t) const {
    Polygon out;
    out.vertices.reserve(vertices.size());
    for (const auto& v : vertices) out.vertices.push_back(t.apply(v));
    return out;
  }

  Polygon translated(const Vec2& d) const {
    Polygon out;
    out.vertices.reserve(vertices.size());
    for (const auto& v : vertices) out.vertices.push_back(v + d);
    return out;
  }

  bool contains(const Vec2& p) const {
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = vertices[i];
      const Vec2& b = vertices[(i + 1) % n];
      if ((b - a).cross(p - a) < 0.0) return false;
    }
    return true;
  }
};

struct Disc {
  Vec2 center;
  double radius = 0.0;
};

inline Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 <= 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

// Distance from a point to the polygon boundary (not signed).
inline double boundary_distance(const Polygon& poly, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = closest_point_on_segment(poly.vertices[i], poly.vertices[(i + 1) % n], p);
    best = std::min(best, (p - c).norm());
  }
  return best;
}

// Distance from a point to the polygon as a solid (0 inside).
inline double polygon_distance(const Polygon& poly, const Vec2& p) {
  if (poly.contains(p)) return 0.0;
  return boundary_distance(poly, p);
}

struct Penetration {
  double depth = 0.0;   // minimal translation along normal that separates
  Vec2 normal;          // unit, from polygon toward the disc center
};

// Minimal-translation resolution of a disc against a convex polygon.
// none when the boundary distance is >= radius (touching is not penetration).
inline std::optional<Penetration> disc_polygon_penetration(const Disc& d, const Polygon& poly) {
  const std::size_t n = poly.size();
  if (poly.contains(d.center)) {
    // deep case: escape through the nearest edge, along its outward normal
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_normal{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly.vertices[i];
      const Vec2& b = poly.vertices[(i + 1) % n];
      const Vec2 out = -(b - a).perp().normalized();  // CCW -> outward is -perp
      const double dist = (d.center - closest_point_on_segment(a, b, d.center)).norm();
      if (dist < best) {
        best = dist;
        best_normal = out;
      }
    }
    return Penetration{d.radius + best, best_normal};
  }
  double best = std::numeric_limits<double>::infinity();
  Vec2 closest;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = closest_point_on_segment(poly.vertices[i], poly.vertices[(i + 1) % n], d.center);
    const double dist = (d.center - c).norm();
    if (dist < best) {
      best = dist;
      closest = c;
    }
  }
  if (best >= d.radius) return std::nullopt;
  Vec2 normal = (d.center - closest);
  if (normal.norm() < 1e-15) {
    // center exactly on the boundary: fall back to the nearest edge normal
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly.vertices[i];
      const Vec2& b = poly.vertices[(i + 1) % n];
      if ((d.center - closest_point_on_segment(a, b, d.center)).norm() < 1e-12)
        return Penetration{d.radius, -(b - a).perp().normalized()};
    }
  }
  return Penetration{d.radius - best, normal.normalized()};
}

namespace detail {
inline bool separating_axis(const Polygon& a, const Polygon& b, const Vec2& axis) {
  double amin = std::numeric_limits<double>::infinity(), amax = -amin;
  double bmin = amin, bmax = -amin;
  for (const auto& v : a.vertices) {
    const double p = v.dot(axis);
    amin = std::min(amin, p);
    amax = std::max(amax, p);
  }
  for (const auto& v : b.vertices) {
    const double p = v.dot(axis);
    bmin = std::min(bmin, p);
    bmax = std::max(bmax, p);
  }
  return amax < bmin || bmax < amin;  // strict: touching counts as overlap
}
}  // namespace detail

// Separating-axis test for convex polygons. Tangency counts as intersection
// (closed-set convention).
inline bool polygons_intersect(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 e = a.vertices[(i + 1) % a.size()] - a.vertices[i];
    if (detail::separating_axis(a, b, e.perp())) return false;
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vec2 e = b.vertices[(i + 1) % b.size()] - b.vertices[i];
    if (detail::separating_axis(a, b, e.perp())) return false;
  }
  return true;
}

inline bool disc_intersects_polygon(const Disc& d, const Polygon& poly) {
  return polygon_distance(poly, d.center) <= d.radius;
}

// Andrew monotone chain, CCW hull. Used for exact swept-polygon footprints.
inline Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return Polygon(pts);
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return Polygon(hull);
}

// Convex footprint swept by a polygon translating along d.
inline Polygon swept_polygon(const Polygon& poly, const Vec2& d) {
  std::vector<Vec2> pts = poly.vertices;
  for (const auto& v : poly.vertices) pts.push_back(v + d);
  return convex_hull(std::move(pts));
}

}  // namespace latpush
