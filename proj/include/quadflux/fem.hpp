#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "quadflux/mesh.hpp"
#include "quadflux/problem.hpp"

namespace quadflux {

using SparseMat = Eigen::SparseMatrix<double>;

// Exact stiffness of the four bilinear shape functions on a hx-by-hy
// rectangle with constant coefficient, corner order ll, lr, ur, ul.
Eigen::Matrix4d local_stiffness(double hx, double hy, double beta);

// P maps regular-node values to all-node values: identity rows on regular
// nodes, convex weight rows on hanging nodes obtained by recursively
// substituting hanging masters until only regular nodes remain.
struct Prolongation {
  SparseMat P;                    // n_nodes x n_regular
  std::vector<int> regular_ids;   // column -> node id (ascending)
  std::vector<int> col_of_node;   // node id -> column, -1 for hanging
};

Prolongation build_prolongation(const QuadtreeMesh& mesh,
                                const NodeClassification& classes);

struct LinearSystem {
  SparseMat A;          // all-node stiffness, exactly symmetric
  Eigen::VectorXd load; // all-node load, 3x3 Gauss per leaf
  Prolongation prol;
  std::vector<int> free_cols;       // P columns of interior regular nodes
  std::vector<int> dirichlet_cols;  // P columns of boundary nodes
};

LinearSystem assemble(const QuadtreeMesh& mesh, const MeshTopology& topo,
                      const ProblemData& problem);

struct DiscreteSolution {
  Eigen::VectorXd u;  // one coefficient per mesh node
};

struct SolveReport {
  long ndof_free = 0;
  double rel_residual = 0.0;
};

// Eliminates Dirichlet columns by interpolating g, solves the SPD reduced
// system P^T A P to relative residual <= 1e-10, and reconstructs hanging
// values through P. Throws std::logic_error if the reduced matrix is not SPD
// and std::runtime_error on residual failure.
DiscreteSolution solve(const QuadtreeMesh& mesh, const MeshTopology& topo,
                       const ProblemData& problem, const LinearSystem& sys,
                       SolveReport* report = nullptr);

DiscreteSolution assemble_and_solve(const QuadtreeMesh& mesh,
                                    const MeshTopology& topo,
                                    const ProblemData& problem,
                                    SolveReport* report = nullptr);

// Bilinear evaluation on one leaf.
double eval_u(const QuadtreeMesh& mesh, int leaf, const DiscreteSolution& sol,
              double x, double y);
Vec2 eval_grad(const QuadtreeMesh& mesh, int leaf, const DiscreteSolution& sol,
               double x, double y);

double beta_on_leaf(const QuadtreeMesh& mesh, int leaf, const ProblemData& problem);

// (sum_K int_K beta_K |grad u - grad u_T|^2)^(1/2) with 5x5 tensor Gauss per
// leaf, graded into registered singular corners. Throws std::logic_error when
// the exact gradient is missing.
double energy_error(const QuadtreeMesh& mesh, const MeshTopology& topo,
                    const DiscreteSolution& sol, const ProblemData& problem);

// ||beta^(1/2) grad u|| by composite quadrature on a uniform subdivision of
// the root boxes (refined `level` times), graded into singular corners.
double exact_energy_norm(const std::vector<std::pair<int, int>>& root_boxes,
                         const ProblemData& problem, int level);

}  // namespace quadflux
