#include "quadflux/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "quadflux/parallel.hpp"
#include "quadflux/quadrature.hpp"

namespace quadflux {

namespace {

// Per-position traces of the combined field sigma_T + beta_K grad u_T on one
// leaf; the second summand is this leaf's own polynomial flux.
std::vector<EdgeFluxTrace> combined_traces(const QuadtreeMesh& mesh,
                                           const MeshTopology& topo,
                                           const DiscreteSolution& sol,
                                           const RecoveredFlux& flux,
                                           double beta_leaf, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  std::vector<EdgeFluxTrace> traces(view.edge_ids.size());
  for (std::size_t k = 0; k < view.edge_ids.size(); ++k) {
    const SubEdge& e = topo.sub_edges[view.edge_ids[k]];
    // one_sided_flux_trace returns -beta grad u_T . n; flip for +beta grad u_T.
    const EdgeFluxTrace own =
        one_sided_flux_trace(mesh, view.leaf, beta_leaf, sol, e);
    const EdgeFluxTrace& rec = flux.traces[view.edge_ids[k]];
    traces[k] = {rec.c0 - own.c0, rec.c1 - own.c1};
  }
  return traces;
}

Vec2 project_combined(const QuadtreeMesh& mesh, const MeshTopology& topo,
                      const DiscreteSolution& sol, const RecoveredFlux& flux,
                      double beta_leaf, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  const Vec2 proj_sigma = oblique_project(flux.traces, flux.divergence[leaf_index],
                                          mesh, topo, leaf_index);
  const Vec2 proj_poly = oblique_project_mean(
      [&](double x, double y) {
        return beta_leaf * eval_grad(mesh, view.leaf, sol, x, y);
      },
      mesh.cell_rect(view.leaf));
  return proj_sigma + proj_poly;
}

}  // namespace

double eta_f_hat(const QuadtreeMesh& mesh, const MeshTopology& topo,
                 const DiscreteSolution& sol, const RecoveredFlux& flux,
                 double beta_leaf, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  const Vec2 c = project_combined(mesh, topo, sol, flux, beta_leaf, leaf_index);
  return c.norm() * std::sqrt(view.area / beta_leaf);
}

double eta_s_hat(const QuadtreeMesh& mesh, const MeshTopology& topo,
                 const DiscreteSolution& sol, const RecoveredFlux& flux,
                 double beta_leaf, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  const Vec2 c = project_combined(mesh, topo, sol, flux, beta_leaf, leaf_index);
  auto traces = combined_traces(mesh, topo, sol, flux, beta_leaf, leaf_index);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const Vec2 n = topo.sub_edges[view.edge_ids[k]].normal();
    traces[k].c0 -= c.dot(n);
  }
  return stability_seminorm(traces, topo, leaf_index) / std::sqrt(beta_leaf);
}

std::pair<double, double> eta_res(const QuadtreeMesh& mesh, const MeshTopology& topo,
                                  const DiscreteSolution& sol,
                                  const ProblemData& problem, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  const Rect rect = mesh.cell_rect(view.leaf);
  const double beta_k = beta_on_leaf(mesh, view.leaf, problem);

  // div(beta_K grad u_T) vanishes for bilinears on rectangles, so the bulk
  // residual is the load alone.
  const double f_sq = tensor_gauss<3>(rect, [&](double x, double y) {
    const double v = problem.f(x, y);
    return v * v;
  });
  const double h_k = view.h_diameter;
  const double bulk_sq = h_k * h_k / beta_k * f_sq;

  const auto& gr = gauss2();
  double jump_sq = 0.0;
  for (std::size_t k = 0; k < view.edge_ids.size(); ++k) {
    const SubEdge& e = topo.sub_edges[view.edge_ids[k]];
    if (e.on_boundary()) continue;  // Dirichlet boundary carries no jump
    const double beta_minus = beta_on_leaf(mesh, e.minus_leaf, problem);
    const double beta_plus = beta_on_leaf(mesh, e.plus_leaf, problem);
    const EdgeFluxTrace tm =
        one_sided_flux_trace(mesh, e.minus_leaf, beta_minus, sol, e);
    const EdgeFluxTrace tp =
        one_sided_flux_trace(mesh, e.plus_leaf, beta_plus, sol, e);
    // [beta grad u_T . n] = minus-side value minus plus-side value; the
    // one-sided traces carry -beta grad u_T . n, the sign cancels in the norm.
    const EdgeFluxTrace jump{tm.c0 - tp.c0, tm.c1 - tp.c1};
    double norm_sq = 0.0;
    for (int q = 0; q < 2; ++q) {
      const double s = gr.node[q] * e.length;
      const double v = jump.c0 + jump.c1 * (s - 0.5 * e.length) / e.length;
      norm_sq += gr.weight[q] * e.length * v * v;
    }
    const double beta_other = view.leaf == e.minus_leaf ? beta_plus : beta_minus;
    jump_sq += 0.5 * e.length / (beta_k + beta_other) * norm_sq;
  }
  return {bulk_sq, jump_sq};
}

double oscillation(const QuadtreeMesh& mesh, const ScalarField& f,
                   double beta_leaf, int leaf) {
  const Rect rect = mesh.cell_rect(leaf);
  const double mean = tensor_gauss<3>(rect, f) / rect.area();
  const double dev_sq = tensor_gauss<3>(rect, [&](double x, double y) {
    const double d = f(x, y) - mean;
    return d * d;
  });
  return std::sqrt(dev_sq / beta_leaf) * rect.diameter();
}

ElementIndicators compute_indicators(const QuadtreeMesh& mesh,
                                     const MeshTopology& topo,
                                     const DiscreteSolution& sol,
                                     const RecoveredFlux& flux,
                                     const ProblemData& problem) {
  const std::size_t n = topo.leaf_ids.size();
  ElementIndicators ind;
  ind.eta_f.resize(n);
  ind.eta_s.resize(n);
  ind.eta_hat_sq.resize(n);
  ind.res_bulk_sq.resize(n);
  ind.res_jump_sq.resize(n);
  ind.osc.resize(n);
  parallel_for(n, [&](std::size_t k) {
    const int leaf = topo.leaf_ids[k];
    const double beta_k = beta_on_leaf(mesh, leaf, problem);
    const int ki = static_cast<int>(k);
    ind.eta_f[k] = eta_f_hat(mesh, topo, sol, flux, beta_k, ki);
    ind.eta_s[k] = eta_s_hat(mesh, topo, sol, flux, beta_k, ki);
    ind.eta_hat_sq[k] = ind.eta_f[k] * ind.eta_f[k] + ind.eta_s[k] * ind.eta_s[k];
    const auto [bulk_sq, jump_sq] = eta_res(mesh, topo, sol, problem, ki);
    ind.res_bulk_sq[k] = bulk_sq;
    ind.res_jump_sq[k] = jump_sq;
    ind.osc[k] = oscillation(mesh, problem.f, beta_k, leaf);
  });
  return ind;
}

GlobalEstimates aggregate(const ElementIndicators& ind) {
  GlobalEstimates g;
  double hat_sq = 0.0, res_sq = 0.0;
  for (std::size_t k = 0; k < ind.eta_hat_sq.size(); ++k) {
    hat_sq += ind.eta_hat_sq[k];
    res_sq += ind.res_bulk_sq[k] + ind.res_jump_sq[k];
  }
  g.eta_hat = std::sqrt(hat_sq);
  g.eta_res = std::sqrt(res_sq);
  return g;
}

double osc_total(const ElementIndicators& ind) {
  double acc = 0.0;
  for (double v : ind.osc) acc += v * v;
  return std::sqrt(acc);
}

double effectivity(double eta, double energy_err) {
  if (!(energy_err > 0.0)) {
    throw std::domain_error("effectivity undefined for zero energy error");
  }
  return eta / energy_err;
}

}  // namespace quadflux
