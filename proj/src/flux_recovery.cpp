#include "quadflux/flux_recovery.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "quadflux/parallel.hpp"
#include "quadflux/quadrature.hpp"

namespace quadflux {

namespace {

Vec2 edge_point(const QuadtreeMesh& mesh, const SubEdge& e, double s) {
  const Vec2 a = mesh.node_xy(e.a);
  return e.vertical ? Vec2{a.x, a.y + s} : Vec2{a.x + s, a.y};
}

double trace_value(const EdgeFluxTrace& t, double s, double h) {
  return t.c0 + t.c1 * (s - 0.5 * h) / h;
}

}  // namespace

double gamma_weight(double beta_minus, double beta_plus) {
  if (!(beta_minus > 0.0) || !(beta_plus > 0.0)) {
    throw std::domain_error("gamma_weight requires positive coefficients");
  }
  const double sp = std::sqrt(beta_plus);
  const double sm = std::sqrt(beta_minus);
  return sp / (sp + sm);
}

EdgeFluxTrace one_sided_flux_trace(const QuadtreeMesh& mesh, int leaf,
                                   double beta_leaf, const DiscreteSolution& sol,
                                   const SubEdge& edge) {
  const Vec2 n = edge.normal();
  const double h = edge.length;
  const auto& gr = gauss2();
  double m0 = 0.0, m1 = 0.0;
  for (int q = 0; q < 2; ++q) {
    const double s = gr.node[q] * h;
    const Vec2 p = edge_point(mesh, edge, s);
    const double value = -beta_leaf * eval_grad(mesh, leaf, sol, p.x, p.y).dot(n);
    const double w = gr.weight[q] * h;
    m0 += w * value;
    m1 += w * value * (s - 0.5 * h) / h;
  }
  return {m0 / h, 12.0 * m1 / h};
}

RecoveredFlux recover_flux(const QuadtreeMesh& mesh, const MeshTopology& topo,
                           const DiscreteSolution& sol, const ProblemData& problem) {
  RecoveredFlux flux;
  flux.traces.resize(topo.sub_edges.size());
  flux.gamma.resize(topo.sub_edges.size());

  std::vector<double> beta(topo.leaf_ids.size());
  for (std::size_t k = 0; k < topo.leaf_ids.size(); ++k) {
    beta[k] = beta_on_leaf(mesh, topo.leaf_ids[k], problem);
  }

  parallel_for(topo.sub_edges.size(), [&](std::size_t i) {
    const SubEdge& e = topo.sub_edges[i];
    if (e.on_boundary()) {
      const int leaf = e.minus_leaf >= 0 ? e.minus_leaf : e.plus_leaf;
      const double b = beta[topo.leaf_index(leaf)];
      flux.traces[i] = one_sided_flux_trace(mesh, leaf, b, sol, e);
      flux.gamma[i] = e.minus_leaf >= 0 ? 1.0 : 0.0;
      return;
    }
    const double bm = beta[topo.leaf_index(e.minus_leaf)];
    const double bp = beta[topo.leaf_index(e.plus_leaf)];
    const double g = gamma_weight(bm, bp);
    const EdgeFluxTrace tm = one_sided_flux_trace(mesh, e.minus_leaf, bm, sol, e);
    const EdgeFluxTrace tp = one_sided_flux_trace(mesh, e.plus_leaf, bp, sol, e);
    flux.traces[i] = {g * tm.c0 + (1.0 - g) * tp.c0, g * tm.c1 + (1.0 - g) * tp.c1};
    flux.gamma[i] = g;
  });

  flux.divergence.resize(topo.leaf_ids.size());
  parallel_for(topo.leaf_ids.size(), [&](std::size_t k) {
    flux.divergence[k] =
        element_divergence(flux.traces, topo, static_cast<int>(k));
  });
  return flux;
}

double element_divergence(std::span<const EdgeFluxTrace> traces_by_edge,
                          const MeshTopology& topo, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  double acc = 0.0;
  for (std::size_t k = 0; k < view.edge_ids.size(); ++k) {
    const SubEdge& e = topo.sub_edges[view.edge_ids[k]];
    // The linear moment integrates to zero over e.
    acc += view.signs[k] * traces_by_edge[view.edge_ids[k]].c0 * e.length;
  }
  return acc / view.area;
}

Vec2 oblique_project(std::span<const EdgeFluxTrace> traces_by_edge,
                     double divergence, const QuadtreeMesh& mesh,
                     const MeshTopology& topo, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  if (!(view.area > 0.0)) throw std::logic_error("degenerate element");
  const Rect rect = mesh.cell_rect(view.leaf);
  const Vec2 xc = rect.center();
  const double hk = view.h_diameter;

  // (Pi tau, grad p)_K = -(div tau, p)_K + sum_e sign (tau.n_e, p)_e for the
  // scaled monomials p in {(x-x_K)/h_K, (y-y_K)/h_K}. The volume term drops:
  // both monomials have zero mean over the rectangle.
  (void)divergence;
  double rhs_x = 0.0, rhs_y = 0.0;
  const auto& gr = gauss2();
  for (std::size_t k = 0; k < view.edge_ids.size(); ++k) {
    const SubEdge& e = topo.sub_edges[view.edge_ids[k]];
    const EdgeFluxTrace& t = traces_by_edge[view.edge_ids[k]];
    const double h = e.length;
    for (int q = 0; q < 2; ++q) {
      const double s = gr.node[q] * h;
      const Vec2 p = edge_point(mesh, e, s);
      const double w = view.signs[k] * gr.weight[q] * h * trace_value(t, s, h);
      rhs_x += w * (p.x - xc.x) / hk;
      rhs_y += w * (p.y - xc.y) / hk;
    }
  }
  // (c, grad p)_K = c_x |K| / h_K for p = (x-x_K)/h_K.
  return {rhs_x * hk / view.area, rhs_y * hk / view.area};
}

Vec2 oblique_project_mean(const VectorField& field, const Rect& box) {
  if (!(box.area() > 0.0)) throw std::logic_error("degenerate element");
  const Vec2 integral{tensor_gauss<3>(box, [&](double x, double y) { return field(x, y).x; }),
                      tensor_gauss<3>(box, [&](double x, double y) { return field(x, y).y; })};
  return integral * (1.0 / box.area());
}

double stability_seminorm(std::span<const EdgeFluxTrace> traces_by_position,
                          const MeshTopology& topo, int leaf_index) {
  const PolygonView& view = topo.views[leaf_index];
  assert(traces_by_position.size() == view.edge_ids.size());
  const auto& gr = gauss2();
  double acc = 0.0;
  for (std::size_t k = 0; k < view.edge_ids.size(); ++k) {
    const SubEdge& e = topo.sub_edges[view.edge_ids[k]];
    const double h = e.length;
    double norm_sq = 0.0;
    for (int q = 0; q < 2; ++q) {
      const double s = gr.node[q] * h;
      const double v = trace_value(traces_by_position[k], s, h);
      norm_sq += gr.weight[q] * h * v * v;
    }
    acc += h * norm_sq;
  }
  return std::sqrt(acc);
}

}  // namespace quadflux
