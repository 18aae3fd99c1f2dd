#pragma once

#include <span>
#include <vector>

#include "quadflux/fem.hpp"
#include "quadflux/mesh.hpp"
#include "quadflux/problem.hpp"

namespace quadflux {

// Linear normal trace on a sub-edge in the scaled monomial basis:
// v(s) = c0 + c1 * (s - h/2) / h for arc length s in [0,h], with s running
// along the global tangent (upward on vertical, rightward on horizontal
// sub-edges).
struct EdgeFluxTrace {
  double c0 = 0.0;
  double c1 = 0.0;
};

// DoF representation of the recovered flux: a single-valued linear normal
// trace per sub-edge plus one divergence constant per leaf.
struct RecoveredFlux {
  std::vector<EdgeFluxTrace> traces;  // by sub-edge id
  std::vector<double> gamma;          // averaging weight used per sub-edge
  std::vector<double> divergence;     // by leaf index (topology order)
};

// Robust averaging weight gamma = sqrt(beta_plus) / (sqrt(beta_plus) +
// sqrt(beta_minus)). Throws std::domain_error on non-positive input.
double gamma_weight(double beta_minus, double beta_plus);

// Moments of the one-sided numerical flux -beta_K grad u_T restricted to one
// sub-edge, taken from the given leaf, against {1, (s-h/2)/h}; 2-point Gauss
// (exact for the bilinear flux).
EdgeFluxTrace one_sided_flux_trace(const QuadtreeMesh& mesh, int leaf,
                                   double beta_leaf, const DiscreteSolution& sol,
                                   const SubEdge& edge);

// Gamma-weighted average of the two one-sided fluxes per interior sub-edge,
// the one-sided flux on boundary sub-edges, and the element divergence
// constants from the divergence theorem.
RecoveredFlux recover_flux(const QuadtreeMesh& mesh, const MeshTopology& topo,
                           const DiscreteSolution& sol, const ProblemData& problem);

// d_K = (1/|K|) sum_e sign * int_e (Q1 trace) ds.
double element_divergence(std::span<const EdgeFluxTrace> traces_by_edge,
                          const MeshTopology& topo, int leaf_index);

// Oblique projection onto gradients of linears (constant vectors), evaluated
// from the edge DoFs and the divergence constant through integration by parts.
Vec2 oblique_project(std::span<const EdgeFluxTrace> traces_by_edge,
                     double divergence, const QuadtreeMesh& mesh,
                     const MeshTopology& topo, int leaf_index);

// Same projection for an elementwise polynomial field: its area mean, 3x3 Gauss.
Vec2 oblique_project_mean(const VectorField& field, const Rect& box);

// sqrt(sum_e h_e ||v . n_e||_e^2) for per-position traces on one leaf.
double stability_seminorm(std::span<const EdgeFluxTrace> traces_by_position,
                          const MeshTopology& topo, int leaf_index);

}  // namespace quadflux
