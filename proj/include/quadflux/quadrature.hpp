#pragma once

#include <array>
#include <cstddef>

#include "quadflux/geometry.hpp"

namespace quadflux {

// Gauss-Legendre nodes/weights on [0,1].
template <int N>
struct GaussRule {
  std::array<double, N> node;
  std::array<double, N> weight;
};

inline const GaussRule<2>& gauss2() {
  static const GaussRule<2> r = {
      {0.5 - 0.5 / 1.7320508075688772935, 0.5 + 0.5 / 1.7320508075688772935},
      {0.5, 0.5}};
  return r;
}

inline const GaussRule<3>& gauss3() {
  static const GaussRule<3> r = {
      {0.5 - 0.5 * 0.7745966692414833770, 0.5,
       0.5 + 0.5 * 0.7745966692414833770},
      {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
  return r;
}

inline const GaussRule<5>& gauss5() {
  static const GaussRule<5> r = {
      {0.5 - 0.5 * 0.9061798459386639928, 0.5 - 0.5 * 0.5384693101056830910,
       0.5, 0.5 + 0.5 * 0.5384693101056830910,
       0.5 + 0.5 * 0.9061798459386639928},
      {0.5 * 0.2369268850561890875, 0.5 * 0.4786286704993664680,
       0.5 * 0.5688888888888888889, 0.5 * 0.4786286704993664680,
       0.5 * 0.2369268850561890875}};
  return r;
}

// Tensor Gauss integral of f(x,y) over a rectangle.
template <int N, typename F>
double tensor_gauss(const Rect& box, F&& f) {
  const auto& r = []() -> const GaussRule<N>& {
    if constexpr (N == 2) return gauss2();
    if constexpr (N == 3) return gauss3();
    if constexpr (N == 5) return gauss5();
  }();
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x = box.x0 + r.node[i] * box.hx();
    for (int j = 0; j < N; ++j) {
      const double y = box.y0 + r.node[j] * box.hy();
      acc += r.weight[i] * r.weight[j] * f(x, y);
    }
  }
  return acc * box.area();
}

// Integral over a rectangle whose integrand may be singular at one corner of
// the box: dyadically grades toward that corner until the remaining subcell
// contributes nothing at the requested relative resolution.
template <typename F>
double graded_corner_integral(Rect box, Vec2 corner, F&& f,
                              double rel_tol = 1e-13, int max_depth = 400) {
  double acc = 0.0;
  for (int depth = 0; depth < max_depth; ++depth) {
    const double mx = 0.5 * (box.x0 + box.x1);
    const double my = 0.5 * (box.y0 + box.y1);
    const bool left = corner.x <= mx;
    const bool bottom = corner.y <= my;
    const Rect keep{left ? box.x0 : mx, bottom ? box.y0 : my,
                    left ? mx : box.x1, bottom ? my : box.y1};
    const Rect quads[4] = {{box.x0, box.y0, mx, my},
                           {mx, box.y0, box.x1, my},
                           {box.x0, my, mx, box.y1},
                           {mx, my, box.x1, box.y1}};
    for (const Rect& q : quads) {
      if (q.x0 == keep.x0 && q.y0 == keep.y0) continue;
      acc += tensor_gauss<5>(q, f);
    }
    const double rest = tensor_gauss<5>(keep, f);
    if (std::abs(rest) <= rel_tol * (std::abs(acc) + std::abs(rest)) ||
        depth + 1 == max_depth) {
      return acc + rest;
    }
    box = keep;
  }
  return acc;
}

}  // namespace quadflux
