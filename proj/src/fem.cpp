#include "quadflux/fem.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>

#include "quadflux/parallel.hpp"
#include "quadflux/quadrature.hpp"

namespace quadflux {

Eigen::Matrix4d local_stiffness(double hx, double hy, double beta) {
  // Split into the two exact one-dimensional factors; corner order ll,lr,ur,ul.
  static const double mx[4][4] = {{2, -2, -1, 1},   //
                                  {-2, 2, 1, -1},   //
                                  {-1, 1, 2, -2},   //
                                  {1, -1, -2, 2}};
  static const double my[4][4] = {{2, 1, -1, -2},   //
                                  {1, 2, -2, -1},   //
                                  {-1, -2, 2, 1},   //
                                  {-2, -1, 1, 2}};
  const double cx = beta * hy / (6.0 * hx);
  const double cy = beta * hx / (6.0 * hy);
  Eigen::Matrix4d K;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) K(i, j) = cx * mx[i][j] + cy * my[i][j];
  }
  return K;
}

Prolongation build_prolongation(const QuadtreeMesh& mesh,
                                const NodeClassification& classes) {
  Prolongation prol;
  const int n = static_cast<int>(mesh.n_nodes());
  prol.col_of_node.assign(n, -1);
  for (int id = 0; id < n; ++id) {
    if (!classes.hanging[id]) {
      prol.col_of_node[id] = static_cast<int>(prol.regular_ids.size());
      prol.regular_ids.push_back(id);
    }
  }

  // weights[node] = list of (regular column, weight); resolved on demand.
  std::vector<std::vector<std::pair<int, double>>> weights(n);
  std::vector<char> state(n, 0);  // 0 new, 1 in progress, 2 done
  auto resolve = [&](auto&& self, int id) -> const std::vector<std::pair<int, double>>& {
    if (state[id] == 2) return weights[id];
    if (state[id] == 1) throw std::logic_error("cycle in hanging-node masters");
    state[id] = 1;
    if (!classes.hanging[id]) {
      weights[id] = {{prol.col_of_node[id], 1.0}};
    } else {
      std::map<int, double> acc;
      for (int m : classes.masters[id]) {
        for (const auto& [col, w] : self(self, m)) acc[col] += 0.5 * w;
      }
      weights[id].assign(acc.begin(), acc.end());
    }
    state[id] = 2;
    return weights[id];
  };

  std::vector<Eigen::Triplet<double>> trips;
  for (int id = 0; id < n; ++id) {
    for (const auto& [col, w] : resolve(resolve, id)) trips.emplace_back(id, col, w);
  }
  prol.P.resize(n, static_cast<int>(prol.regular_ids.size()));
  prol.P.setFromTriplets(trips.begin(), trips.end());
  return prol;
}

double beta_on_leaf(const QuadtreeMesh& mesh, int leaf, const ProblemData& problem) {
  const Vec2 c = mesh.cell_rect(leaf).center();
  const double b = problem.beta(c.x, c.y);
  if (!(b > 0.0)) throw std::domain_error("beta must be positive");
  return b;
}

LinearSystem assemble(const QuadtreeMesh& mesh, const MeshTopology& topo,
                      const ProblemData& problem) {
  LinearSystem sys;
  const std::size_t n_leaves = topo.leaf_ids.size();

  struct LocalPiece {
    std::array<int, 4> nodes;
    Eigen::Matrix4d K;
    Eigen::Vector4d b;
  };
  std::vector<LocalPiece> local(n_leaves);
  parallel_for(n_leaves, [&](std::size_t k) {
    const int leaf = topo.leaf_ids[k];
    const Rect r = mesh.cell_rect(leaf);
    LocalPiece& piece = local[k];
    piece.nodes = mesh.cell_corner_nodes(leaf);
    piece.K = local_stiffness(r.hx(), r.hy(), beta_on_leaf(mesh, leaf, problem));
    piece.b.setZero();
    const auto& gr = gauss3();
    for (int i = 0; i < 3; ++i) {
      const double gx = r.x0 + gr.node[i] * r.hx();
      const double xi = gr.node[i];
      for (int j = 0; j < 3; ++j) {
        const double gy = r.y0 + gr.node[j] * r.hy();
        const double eta = gr.node[j];
        const double w = gr.weight[i] * gr.weight[j] * r.area() * problem.f(gx, gy);
        piece.b[0] += w * (1 - xi) * (1 - eta);
        piece.b[1] += w * xi * (1 - eta);
        piece.b[2] += w * xi * eta;
        piece.b[3] += w * (1 - xi) * eta;
      }
    }
  });

  // Scatter in leaf order so duplicate sums are reproducible.
  const int n = static_cast<int>(mesh.n_nodes());
  sys.load = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(16 * n_leaves);
  for (const LocalPiece& piece : local) {
    for (int i = 0; i < 4; ++i) {
      sys.load[piece.nodes[i]] += piece.b[i];
      for (int j = 0; j < 4; ++j) {
        trips.emplace_back(piece.nodes[i], piece.nodes[j], piece.K(i, j));
      }
    }
  }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());

  sys.prol = build_prolongation(mesh, topo.classes);
  for (std::size_t col = 0; col < sys.prol.regular_ids.size(); ++col) {
    const int id = sys.prol.regular_ids[col];
    if (topo.node_on_boundary[id]) {
      sys.dirichlet_cols.push_back(static_cast<int>(col));
    } else {
      sys.free_cols.push_back(static_cast<int>(col));
    }
  }
  return sys;
}

DiscreteSolution solve(const QuadtreeMesh& mesh, const MeshTopology& topo,
                       const ProblemData& problem, const LinearSystem& sys,
                       SolveReport* report) {
  (void)topo;
  const int n_reg = static_cast<int>(sys.prol.regular_ids.size());
  const int n_free = static_cast<int>(sys.free_cols.size());

  // u on regular nodes, Dirichlet values interpolated up front.
  Eigen::VectorXd u_reg = Eigen::VectorXd::Zero(n_reg);
  for (int col : sys.dirichlet_cols) {
    const Vec2 p = mesh.node_xy(sys.prol.regular_ids[col]);
    u_reg[col] = problem.g(p.x, p.y);
  }

  const SparseMat B = sys.prol.P.transpose() * sys.A * sys.prol.P;
  const Eigen::VectorXd rhs_full =
      sys.prol.P.transpose() * sys.load - B * u_reg;

  std::vector<int> free_index(n_reg, -1);
  for (int i = 0; i < n_free; ++i) free_index[sys.free_cols[i]] = i;

  if (n_free > 0) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int col = 0; col < B.outerSize(); ++col) {
      const int jc = free_index[col];
      if (jc < 0) continue;
      for (SparseMat::InnerIterator it(B, col); it; ++it) {
        const int ir = free_index[static_cast<int>(it.row())];
        if (ir >= 0) trips.emplace_back(ir, jc, it.value());
      }
    }
    SparseMat Bff(n_free, n_free);
    Bff.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd rhs(n_free);
    for (int i = 0; i < n_free; ++i) rhs[i] = rhs_full[sys.free_cols[i]];

    Eigen::SimplicialLDLT<SparseMat> ldlt(Bff);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
      throw std::logic_error("reduced system P^T A P is not SPD");
    }
    Eigen::VectorXd uf = ldlt.solve(rhs);
    const double rhs_norm = rhs.norm();
    double res = rhs_norm > 0.0 ? (Bff * uf - rhs).norm() / rhs_norm : 0.0;
    for (int pass = 0; pass < 3 && res > 1e-12; ++pass) {  // iterative refinement
      uf += ldlt.solve(rhs - Bff * uf);
      res = (Bff * uf - rhs).norm() / rhs_norm;
    }
    if (!(res <= 1e-10)) {
      throw std::runtime_error("linear solver residual " + std::to_string(res) +
                               " exceeds 1e-10");
    }
    for (int i = 0; i < n_free; ++i) u_reg[sys.free_cols[i]] = uf[i];
    if (report) report->rel_residual = res;
  }
  if (report) report->ndof_free = n_free;

  DiscreteSolution sol;
  sol.u = sys.prol.P * u_reg;
  return sol;
}

DiscreteSolution assemble_and_solve(const QuadtreeMesh& mesh,
                                    const MeshTopology& topo,
                                    const ProblemData& problem,
                                    SolveReport* report) {
  const LinearSystem sys = assemble(mesh, topo, problem);
  return solve(mesh, topo, problem, sys, report);
}

namespace {

struct Corners {
  Rect r;
  double v[4];  // ll, lr, ur, ul
};

Corners leaf_corners(const QuadtreeMesh& mesh, int leaf, const DiscreteSolution& sol) {
  Corners c;
  c.r = mesh.cell_rect(leaf);
  const auto ids = mesh.cell_corner_nodes(leaf);
  for (int i = 0; i < 4; ++i) c.v[i] = sol.u[ids[i]];
  return c;
}

double bilinear(const Corners& c, double x, double y) {
  const double xi = (x - c.r.x0) / c.r.hx();
  const double eta = (y - c.r.y0) / c.r.hy();
  return c.v[0] * (1 - xi) * (1 - eta) + c.v[1] * xi * (1 - eta) +
         c.v[2] * xi * eta + c.v[3] * (1 - xi) * eta;
}

Vec2 bilinear_grad(const Corners& c, double x, double y) {
  const double xi = (x - c.r.x0) / c.r.hx();
  const double eta = (y - c.r.y0) / c.r.hy();
  return {((c.v[1] - c.v[0]) * (1 - eta) + (c.v[2] - c.v[3]) * eta) / c.r.hx(),
          ((c.v[3] - c.v[0]) * (1 - xi) + (c.v[2] - c.v[1]) * xi) / c.r.hy()};
}

}  // namespace

double eval_u(const QuadtreeMesh& mesh, int leaf, const DiscreteSolution& sol,
              double x, double y) {
  return bilinear(leaf_corners(mesh, leaf, sol), x, y);
}

Vec2 eval_grad(const QuadtreeMesh& mesh, int leaf, const DiscreteSolution& sol,
               double x, double y) {
  return bilinear_grad(leaf_corners(mesh, leaf, sol), x, y);
}

namespace {

// Is p one of the corners of r (up to roundoff at the lattice scale)?
bool corner_of(const Rect& r, const Vec2& p) {
  const bool on_x = p.x == r.x0 || p.x == r.x1;
  const bool on_y = p.y == r.y0 || p.y == r.y1;
  return on_x && on_y;
}

}  // namespace

double energy_error(const QuadtreeMesh& mesh, const MeshTopology& topo,
                    const DiscreteSolution& sol, const ProblemData& problem) {
  if (!problem.has_exact()) {
    throw std::logic_error("energy_error requires the exact gradient");
  }
  const std::size_t n_leaves = topo.leaf_ids.size();
  std::vector<double> contrib(n_leaves, 0.0);
  parallel_for(n_leaves, [&](std::size_t k) {
    const int leaf = topo.leaf_ids[k];
    const Corners c = leaf_corners(mesh, leaf, sol);
    const double beta = beta_on_leaf(mesh, leaf, problem);
    auto density = [&](double x, double y) {
      const Vec2 d = problem.exact_grad(x, y) - bilinear_grad(c, x, y);
      return beta * d.dot(d);
    };
    const Vec2* corner = nullptr;
    for (const Vec2& s : problem.singular_points) {
      if (corner_of(c.r, s)) {
        corner = &s;
        break;
      }
    }
    contrib[k] = corner ? graded_corner_integral(c.r, *corner, density)
                        : tensor_gauss<5>(c.r, density);
  });
  double acc = 0.0;
  for (double v : contrib) acc += v;
  return std::sqrt(acc);
}

double exact_energy_norm(const std::vector<std::pair<int, int>>& root_boxes,
                         const ProblemData& problem, int level) {
  if (!problem.has_exact()) {
    throw std::logic_error("exact_energy_norm requires the exact gradient");
  }
  auto density = [&](double x, double y) {
    const Vec2 d = problem.exact_grad(x, y);
    return problem.beta(x, y) * d.dot(d);
  };
  const int cells = 1 << level;
  const double h = 1.0 / cells;
  std::vector<Rect> boxes;
  for (const auto& [cx, cy] : root_boxes) {
    for (int i = 0; i < cells; ++i) {
      for (int j = 0; j < cells; ++j) {
        boxes.push_back(Rect{cx + i * h, cy + j * h, cx + (i + 1) * h,
                             cy + (j + 1) * h});
      }
    }
  }
  std::vector<double> contrib(boxes.size(), 0.0);
  parallel_for(boxes.size(), [&](std::size_t k) {
    const Rect& b = boxes[k];
    const Vec2* corner = nullptr;
    for (const Vec2& s : problem.singular_points) {
      if (corner_of(b, s)) {
        corner = &s;
        break;
      }
    }
    contrib[k] = corner ? graded_corner_integral(b, *corner, density)
                        : tensor_gauss<5>(b, density);
  });
  double acc = 0.0;
  for (double v : contrib) acc += v;
  return std::sqrt(acc);
}

}  // namespace quadflux
