#pragma once

#include <cmath>

namespace quadflux {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Axis-aligned rectangle in physical coordinates.
struct Rect {
  double x0, y0, x1, y1;
  double hx() const { return x1 - x0; }
  double hy() const { return y1 - y0; }
  double area() const { return hx() * hy(); }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  double diameter() const { return std::hypot(hx(), hy()); }
};

}  // namespace quadflux
