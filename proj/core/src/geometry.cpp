#include "granusense/geometry.hpp"

#include <cmath>

#include "granusense/errors.hpp"

namespace granusense::geom {
namespace {

constexpr double kDegToRad = 0.017453292519943295;

}  // namespace

Vec2 rotate_deg(Vec2 p, double angle_deg) {
  double c = std::cos(angle_deg * kDegToRad);
  double s = std::sin(angle_deg * kDegToRad);
  return {c * p.x - s * p.z, s * p.x + c * p.z};
}

double polygon_area(const Polygon& poly) {
  const auto& v = poly.pts;
  double twice = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    twice += a.x * b.z - b.x * a.z;
  }
  return 0.5 * twice;
}

Vec2 polygon_centroid(const Polygon& poly) {
  const auto& v = poly.pts;
  double twice = 0.0;
  double cx = 0.0, cz = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    double cross = a.x * b.z - b.x * a.z;
    twice += cross;
    cx += (a.x + b.x) * cross;
    cz += (a.z + b.z) * cross;
  }
  if (twice == 0.0) throw DomainError("centroid of a degenerate polygon");
  return {cx / (3.0 * twice), cz / (3.0 * twice)};
}

Polygon clip_half_plane(const Polygon& poly, Vec2 normal, double offset) {
  // Sutherland-Hodgman against a single edge.
  Polygon out;
  const auto& v = poly.pts;
  const std::size_t n = v.size();
  out.pts.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    double da = dot(normal, a) - offset;
    double db = dot(normal, b) - offset;
    if (da <= 0.0) out.pts.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      double t = da / (da - db);
      out.pts.push_back(a + t * (b - a));
    }
  }
  return out;
}

CrossSection content_cross_section(double surface_angle_deg,
                                   double target_area_mm2, double width_mm,
                                   double height_mm) {
  if (!(width_mm > 0.0) || !(height_mm > 0.0))
    throw DomainError("container cross-section must have positive extent");
  double full = width_mm * height_mm;
  if (!(target_area_mm2 > 0.0) || !(target_area_mm2 < full))
    throw DomainError("content area must lie strictly inside the container");
  if (!std::isfinite(surface_angle_deg))
    throw DomainError("surface angle must be finite");

  Polygon rect;
  rect.pts = {{0.0, 0.0},
              {width_mm, 0.0},
              {width_mm, height_mm},
              {0.0, height_mm}};

  double rad = surface_angle_deg * kDegToRad;
  Vec2 n{-std::sin(rad), std::cos(rad)};

  // Area below the line grows monotonically with the offset; bisect between
  // the extreme corner projections until the bracket collapses.
  double lo = dot(n, rect.pts[0]);
  double hi = lo;
  for (const Vec2& p : rect.pts) {
    double d = dot(n, p);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  double span = hi - lo;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * span; ++it) {
    double mid = 0.5 * (lo + hi);
    double area = polygon_area(clip_half_plane(rect, n, mid));
    (area < target_area_mm2 ? lo : hi) = mid;
  }

  double offset = 0.5 * (lo + hi);
  CrossSection cs;
  cs.region = clip_half_plane(rect, n, offset);
  cs.surface_normal = n;
  cs.surface_offset = offset;
  return cs;
}

}  // namespace granusense::geom
