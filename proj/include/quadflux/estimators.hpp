#pragma once

#include <vector>

#include "quadflux/flux_recovery.hpp"

namespace quadflux {

// Per-leaf indicators, all in energy-norm units, indexed in topology order.
struct ElementIndicators {
  std::vector<double> eta_f;          // projected recovered-flux mismatch
  std::vector<double> eta_s;          // stabilization part
  std::vector<double> eta_hat_sq;     // eta_f^2 + eta_s^2
  std::vector<double> res_bulk_sq;    // beta^-1 h_K^2 ||f + div(beta grad u_T)||^2
  std::vector<double> res_jump_sq;    // (1/2) sum_e h_e/(beta+beta_e) ||jump||^2
  std::vector<double> osc;            // beta^-1/2 h_K ||f - mean f||
};

ElementIndicators compute_indicators(const QuadtreeMesh& mesh,
                                     const MeshTopology& topo,
                                     const DiscreteSolution& sol,
                                     const RecoveredFlux& flux,
                                     const ProblemData& problem);

// Single-leaf entry points (the loop above is just these, element-parallel).
double eta_f_hat(const QuadtreeMesh& mesh, const MeshTopology& topo,
                 const DiscreteSolution& sol, const RecoveredFlux& flux,
                 double beta_leaf, int leaf_index);
double eta_s_hat(const QuadtreeMesh& mesh, const MeshTopology& topo,
                 const DiscreteSolution& sol, const RecoveredFlux& flux,
                 double beta_leaf, int leaf_index);
// (bulk^2, jump^2) of the residual comparison estimator.
std::pair<double, double> eta_res(const QuadtreeMesh& mesh, const MeshTopology& topo,
                                  const DiscreteSolution& sol,
                                  const ProblemData& problem, int leaf_index);
double oscillation(const QuadtreeMesh& mesh, const ScalarField& f,
                   double beta_leaf, int leaf);

struct GlobalEstimates {
  double eta_hat = 0.0;
  double eta_res = 0.0;
};

// Square roots of the fixed-order (leaf index) sums of squares.
GlobalEstimates aggregate(const ElementIndicators& ind);

double osc_total(const ElementIndicators& ind);

// eta / energy error. Throws std::domain_error when the error is zero.
double effectivity(double eta, double energy_err);

}  // namespace quadflux
