#pragma once

#include <functional>
#include <vector>

#include "quadflux/geometry.hpp"

namespace quadflux {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Vec2(double, double)>;

// Data of the diffusion problem -div(beta grad u) = f, u = g on the boundary.
// beta is piecewise constant per element and gets sampled at leaf centroids.
struct ProblemData {
  ScalarField beta;
  ScalarField f;
  ScalarField g;

  // Optional exact solution for error evaluation and stopping.
  ScalarField exact_u;
  VectorField exact_grad;
  // Points where exact_grad blows up; energy quadrature grades into them.
  std::vector<Vec2> singular_points;
  // ||beta^(1/2) grad u|| over the domain; < 0 when unknown.
  double exact_energy_norm = -1.0;

  bool has_exact() const { return static_cast<bool>(exact_grad); }
};

}  // namespace quadflux
