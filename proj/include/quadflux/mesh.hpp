#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "quadflux/geometry.hpp"

namespace quadflux {

// All node coordinates live on a global dyadic integer lattice: root boxes are
// unit squares at integer offsets and a level-l cell has side kUnit >> l.
// Integer identity makes node deduplication exact at any refinement depth.
inline constexpr int kMaxLevel = 60;
inline constexpr std::int64_t kUnit = std::int64_t{1} << kMaxLevel;

inline double to_physical(std::int64_t v) {
  return static_cast<double>(v) / static_cast<double>(kUnit);
}

struct Node {
  std::int64_t ix, iy;
  // Endpoints of the mesh edge this node was created to bisect; -1 for root
  // corners and cell centers. These are the hanging-node masters.
  int master_a = -1;
  int master_b = -1;
};

struct Cell {
  std::int64_t x0, y0;
  std::int64_t size;
  int level;
  int parent;                                  // -1 for root cells
  std::array<int, 4> child{-1, -1, -1, -1};    // ll, lr, ul, ur
  bool is_leaf() const { return child[0] < 0; }
};

class QuadtreeMesh {
 public:
  // Root boxes are unit squares with the given integer lower-left corners.
  static QuadtreeMesh from_root_boxes(const std::vector<std::pair<int, int>>& corners);
  static QuadtreeMesh unit_square();  // (0,1)^2

  // Quadsects every marked leaf, then (if a cap is given) iterates closure
  // until no element edge carries more than `cap` hanging nodes.
  // Throws std::invalid_argument if a marked id is not a leaf and
  // std::runtime_error if closure would exceed the level budget.
  void refine(const std::vector<int>& marked, std::optional<int> cap = {});

  std::vector<int> leaf_ids() const;  // ascending cell ids
  const Cell& cell(int id) const { return cells_[id]; }
  std::size_t n_cells() const { return cells_.size(); }
  std::size_t n_nodes() const { return nodes_.size(); }
  const Node& node(int id) const { return nodes_[id]; }
  Vec2 node_xy(int id) const {
    return {to_physical(nodes_[id].ix), to_physical(nodes_[id].iy)};
  }
  int node_id(std::int64_t ix, std::int64_t iy) const;  // -1 if absent

  Rect cell_rect(int id) const {
    const Cell& c = cells_[id];
    return {to_physical(c.x0), to_physical(c.y0), to_physical(c.x0 + c.size),
            to_physical(c.y0 + c.size)};
  }
  // Corner node ids in CCW order: ll, lr, ur, ul.
  std::array<int, 4> cell_corner_nodes(int id) const;

  // Leaf whose closure contains (x,y); ties resolved toward the cell with the
  // point in its half-open [x0,x1) x [y0,y1) box. -1 if outside the domain.
  int leaf_at(double x, double y) const;

  double total_area() const;

 private:
  struct CoordHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const {
      std::uint64_t a = static_cast<std::uint64_t>(p.first) * 0x9e3779b97f4a7c15ull;
      return a ^ (static_cast<std::uint64_t>(p.second) + (a << 6) + (a >> 2));
    }
  };

  int get_or_add_node(std::int64_t ix, std::int64_t iy, int ma = -1, int mb = -1);
  void quadsect(int id);

  std::vector<Cell> cells_;
  std::vector<Node> nodes_;
  std::vector<int> roots_;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, int, CoordHash> node_lookup_;
};

struct NodeClassification {
  std::vector<bool> hanging;                    // by node id
  std::vector<std::array<int, 2>> masters;      // {-1,-1} for regular nodes
  int n_hanging = 0;
};

struct SubEdge {
  int a, b;           // endpoint node ids, ascending along the tangent
                      // (bottom->top for vertical, left->right for horizontal)
  bool vertical;      // n_e = (1,0) if vertical, (0,1) if horizontal
  double length;
  int minus_leaf = -1;  // leaf on the side n_e points away from
  int plus_leaf = -1;   // leaf n_e points into; -1 marks the domain boundary
  bool on_boundary() const { return minus_leaf < 0 || plus_leaf < 0; }
  Vec2 normal() const { return vertical ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; }
};

// One leaf viewed as a polygon: the CCW boundary node cycle (hanging nodes
// included), one sub-edge per cycle position, and the orientation sign of the
// global edge normal against the leaf's outward normal.
struct PolygonView {
  int leaf = -1;                 // cell id
  std::vector<int> cycle;        // starts at the lower-left corner
  std::vector<int> edge_ids;     // edge_ids[k] joins cycle[k] -> cycle[k+1]
  std::vector<int> signs;        // +1 if this leaf is the edge's minus side
  double h_diameter = 0.0;
  double area = 0.0;
};

struct MeshTopology {
  NodeClassification classes;
  std::vector<int> leaf_ids;           // ascending cell ids
  std::vector<PolygonView> views;      // parallel to leaf_ids
  std::vector<SubEdge> sub_edges;
  std::vector<char> node_on_boundary;  // by node id

  int leaf_index(int cell_id) const { return leaf_index_.at(cell_id); }
  const PolygonView& view_of(int cell_id) const { return views[leaf_index(cell_id)]; }

  std::unordered_map<int, int> leaf_index_;
};

NodeClassification classify_nodes(const QuadtreeMesh& mesh);

// Max number of hanging nodes carried by any element edge.
int irregularity(const QuadtreeMesh& mesh);

// Classification, polygon views and the oriented sub-edge table in one pass.
MeshTopology build_topology(const QuadtreeMesh& mesh);

}  // namespace quadflux
