#pragma once

#include <vector>

namespace granusense::geom {

// Point or direction in the tilt plane; x is horizontal, z vertical when the
// frame is the world frame.
struct Vec2 {
  double x = 0.0;
  double z = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.z + b.z}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.z}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.z * b.z; }

// Counter-clockwise rotation by an angle in degrees.
Vec2 rotate_deg(Vec2 p, double angle_deg);

// Simple polygon, vertices in counter-clockwise order.
struct Polygon {
  std::vector<Vec2> pts;
};

// Signed shoelace area; positive for counter-clockwise vertex order.
double polygon_area(const Polygon& poly);

// Area centroid. The polygon must have nonzero area.
Vec2 polygon_centroid(const Polygon& poly);

// Intersection of the polygon with the half-plane dot(normal, p) <= offset.
// Convexity of the input is assumed (all callers clip rectangles).
Polygon clip_half_plane(const Polygon& poly, Vec2 normal, double offset);

// Settled content region inside a rectangular container cross-section, in
// the container frame (origin at the inner base-left corner, x across the
// width, z up the wall).
//
// The free surface is the line dot(n, p) = offset with unit normal
// n = (-sin(surface_angle), cos(surface_angle)); surface_angle is measured
// in the same frame as the rectangle. The offset is solved so the clipped
// region matches target_area_mm2, which encodes volume conservation of the
// content as the container tilts around it.
struct CrossSection {
  Polygon region;          // content polygon, container frame
  Vec2 surface_normal;     // unit normal of the free surface
  double surface_offset;   // dot(normal, p) on the surface line
};

CrossSection content_cross_section(double surface_angle_deg,
                                   double target_area_mm2, double width_mm,
                                   double height_mm);

}  // namespace granusense::geom
