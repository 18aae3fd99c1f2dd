#include "quadflux/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>
#include <string>

namespace quadflux {

namespace {

// Nodes grouped by grid line, sorted along the line. Every classification and
// traversal query reduces to a range scan on one line.
struct LineIndex {
  // key: line coordinate; value: (coordinate along line, node id), sorted
  std::map<std::int64_t, std::vector<std::pair<std::int64_t, int>>> vertical;
  std::map<std::int64_t, std::vector<std::pair<std::int64_t, int>>> horizontal;

  explicit LineIndex(const QuadtreeMesh& mesh) {
    for (int id = 0; id < static_cast<int>(mesh.n_nodes()); ++id) {
      const Node& n = mesh.node(id);
      vertical[n.ix].emplace_back(n.iy, id);
      horizontal[n.iy].emplace_back(n.ix, id);
    }
    for (auto& [k, v] : vertical) std::sort(v.begin(), v.end());
    for (auto& [k, v] : horizontal) std::sort(v.begin(), v.end());
  }

  // Node ids on the given line with coordinate in [lo,hi] (inclusive=true)
  // or (lo,hi) (inclusive=false), in ascending order.
  void range(bool on_vertical_line, std::int64_t line, std::int64_t lo,
             std::int64_t hi, bool inclusive, std::vector<int>& out) const {
    out.clear();
    const auto& table = on_vertical_line ? vertical : horizontal;
    auto it = table.find(line);
    if (it == table.end()) return;
    const auto& v = it->second;
    auto first = std::lower_bound(v.begin(), v.end(),
                                  std::make_pair(lo, inclusive ? -1 : INT32_MAX));
    for (; first != v.end(); ++first) {
      if (first->first > hi || (!inclusive && first->first == hi)) break;
      if (!inclusive && first->first == lo) continue;
      out.push_back(first->second);
    }
  }
};

struct ElementEdge {
  bool vertical;
  std::int64_t line, lo, hi;
};

std::array<ElementEdge, 4> element_edges(const Cell& c) {
  return {ElementEdge{false, c.y0, c.x0, c.x0 + c.size},
          ElementEdge{true, c.x0 + c.size, c.y0, c.y0 + c.size},
          ElementEdge{false, c.y0 + c.size, c.x0, c.x0 + c.size},
          ElementEdge{true, c.x0, c.y0, c.y0 + c.size}};
}

}  // namespace

QuadtreeMesh QuadtreeMesh::from_root_boxes(
    const std::vector<std::pair<int, int>>& corners) {
  if (corners.empty()) throw std::invalid_argument("mesh needs at least one root box");
  QuadtreeMesh mesh;
  for (const auto& [cx, cy] : corners) {
    const std::int64_t x0 = static_cast<std::int64_t>(cx) * kUnit;
    const std::int64_t y0 = static_cast<std::int64_t>(cy) * kUnit;
    mesh.get_or_add_node(x0, y0);
    mesh.get_or_add_node(x0 + kUnit, y0);
    mesh.get_or_add_node(x0, y0 + kUnit);
    mesh.get_or_add_node(x0 + kUnit, y0 + kUnit);
    Cell root{x0, y0, kUnit, 0, -1, {-1, -1, -1, -1}};
    mesh.roots_.push_back(static_cast<int>(mesh.cells_.size()));
    mesh.cells_.push_back(root);
  }
  return mesh;
}

QuadtreeMesh QuadtreeMesh::unit_square() { return from_root_boxes({{0, 0}}); }

int QuadtreeMesh::get_or_add_node(std::int64_t ix, std::int64_t iy, int ma, int mb) {
  auto [it, inserted] =
      node_lookup_.try_emplace({ix, iy}, static_cast<int>(nodes_.size()));
  if (inserted) {
    nodes_.push_back(Node{ix, iy, ma, mb});
  }
  return it->second;
}

int QuadtreeMesh::node_id(std::int64_t ix, std::int64_t iy) const {
  auto it = node_lookup_.find({ix, iy});
  return it == node_lookup_.end() ? -1 : it->second;
}

std::array<int, 4> QuadtreeMesh::cell_corner_nodes(int id) const {
  const Cell& c = cells_[id];
  return {node_id(c.x0, c.y0), node_id(c.x0 + c.size, c.y0),
          node_id(c.x0 + c.size, c.y0 + c.size), node_id(c.x0, c.y0 + c.size)};
}

std::vector<int> QuadtreeMesh::leaf_ids() const {
  std::vector<int> out;
  for (int id = 0; id < static_cast<int>(cells_.size()); ++id) {
    if (cells_[id].is_leaf()) out.push_back(id);
  }
  return out;
}

int QuadtreeMesh::leaf_at(double x, double y) const {
  for (int root : roots_) {
    const Rect r = cell_rect(root);
    if (x < r.x0 || x > r.x1 || y < r.y0 || y > r.y1) continue;
    int id = root;
    while (!cells_[id].is_leaf()) {
      const Cell& c = cells_[id];
      const double mx = to_physical(c.x0 + c.size / 2);
      const double my = to_physical(c.y0 + c.size / 2);
      const int col = x < mx ? 0 : 1;
      const int row = y < my ? 0 : 1;
      id = c.child[2 * row + col];
    }
    return id;
  }
  return -1;
}

double QuadtreeMesh::total_area() const {
  double acc = 0.0;
  for (const Cell& c : cells_) {
    if (!c.is_leaf()) continue;
    const double s = to_physical(c.size);
    acc += s * s;
  }
  return acc;
}

void QuadtreeMesh::quadsect(int id) {
  Cell& c = cells_[id];
  assert(c.is_leaf());
  if (c.level >= kMaxLevel) {
    throw std::runtime_error("refinement exceeds the level budget (level " +
                             std::to_string(c.level) + ")");
  }
  const std::int64_t h = c.size / 2;
  const std::int64_t x0 = c.x0, y0 = c.y0, x1 = c.x0 + c.size, y1 = c.y0 + c.size;
  const int a = node_id(x0, y0), b = node_id(x1, y0);
  const int d = node_id(x0, y1), e = node_id(x1, y1);
  get_or_add_node(x0 + h, y0, a, b);
  get_or_add_node(x1, y0 + h, b, e);
  get_or_add_node(x0 + h, y1, d, e);
  get_or_add_node(x0, y0 + h, a, d);
  get_or_add_node(x0 + h, y0 + h);
  const int base = static_cast<int>(cells_.size());
  const int level = c.level + 1;
  cells_.push_back(Cell{x0, y0, h, level, id, {-1, -1, -1, -1}});
  cells_.push_back(Cell{x0 + h, y0, h, level, id, {-1, -1, -1, -1}});
  cells_.push_back(Cell{x0, y0 + h, h, level, id, {-1, -1, -1, -1}});
  cells_.push_back(Cell{x0 + h, y0 + h, h, level, id, {-1, -1, -1, -1}});
  cells_[id].child = {base, base + 1, base + 2, base + 3};
}

void QuadtreeMesh::refine(const std::vector<int>& marked, std::optional<int> cap) {
  std::vector<int> batch(marked);
  std::sort(batch.begin(), batch.end());
  batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
  for (int id : batch) {
    if (id < 0 || id >= static_cast<int>(cells_.size()) || !cells_[id].is_leaf()) {
      throw std::invalid_argument("refine: id " + std::to_string(id) +
                                  " is not a current leaf");
    }
  }
  for (int id : batch) quadsect(id);
  if (!cap) return;
  if (*cap < 0) throw std::invalid_argument("refine: negative irregularity cap");

  const int round_budget = 100000;
  std::vector<int> inside;
  for (int round = 0;; ++round) {
    if (round >= round_budget) {
      throw std::runtime_error("irregularity closure failed to terminate");
    }
    LineIndex lines(*this);
    std::vector<int> over;
    for (int id = 0; id < static_cast<int>(cells_.size()); ++id) {
      if (!cells_[id].is_leaf()) continue;
      for (const ElementEdge& e : element_edges(cells_[id])) {
        lines.range(e.vertical, e.line, e.lo, e.hi, /*inclusive=*/false, inside);
        if (static_cast<int>(inside.size()) > *cap) {
          over.push_back(id);
          break;
        }
      }
    }
    if (over.empty()) return;
    for (int id : over) quadsect(id);
  }
}

NodeClassification classify_nodes(const QuadtreeMesh& mesh) {
  NodeClassification cls;
  cls.hanging.assign(mesh.n_nodes(), false);
  cls.masters.assign(mesh.n_nodes(), {-1, -1});
  LineIndex lines(mesh);
  std::vector<int> inside;
  for (int id = 0; id < static_cast<int>(mesh.n_cells()); ++id) {
    if (!mesh.cell(id).is_leaf()) continue;
    for (const ElementEdge& e : element_edges(mesh.cell(id))) {
      lines.range(e.vertical, e.line, e.lo, e.hi, /*inclusive=*/false, inside);
      for (int nid : inside) cls.hanging[nid] = true;
    }
  }
  for (std::size_t nid = 0; nid < mesh.n_nodes(); ++nid) {
    if (!cls.hanging[nid]) continue;
    const Node& n = mesh.node(nid);
    assert(n.master_a >= 0 && n.master_b >= 0);
    cls.masters[nid] = {n.master_a, n.master_b};
    ++cls.n_hanging;
  }
  return cls;
}

int irregularity(const QuadtreeMesh& mesh) {
  LineIndex lines(mesh);
  std::vector<int> inside;
  int worst = 0;
  for (int id = 0; id < static_cast<int>(mesh.n_cells()); ++id) {
    if (!mesh.cell(id).is_leaf()) continue;
    for (const ElementEdge& e : element_edges(mesh.cell(id))) {
      lines.range(e.vertical, e.line, e.lo, e.hi, /*inclusive=*/false, inside);
      worst = std::max(worst, static_cast<int>(inside.size()));
    }
  }
  return worst;
}

MeshTopology build_topology(const QuadtreeMesh& mesh) {
  MeshTopology topo;
  topo.classes = classify_nodes(mesh);
  topo.leaf_ids = mesh.leaf_ids();
  topo.views.resize(topo.leaf_ids.size());
  topo.node_on_boundary.assign(mesh.n_nodes(), 0);
  for (std::size_t k = 0; k < topo.leaf_ids.size(); ++k) {
    topo.leaf_index_[topo.leaf_ids[k]] = static_cast<int>(k);
  }

  LineIndex lines(mesh);
  std::vector<int> run;
  // canonical (min node, max node) -> sub-edge id
  std::unordered_map<std::uint64_t, int> edge_lookup;
  auto edge_key = [](int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
  };

  for (std::size_t k = 0; k < topo.leaf_ids.size(); ++k) {
    const int leaf = topo.leaf_ids[k];
    const Cell& c = mesh.cell(leaf);
    PolygonView& view = topo.views[k];
    view.leaf = leaf;
    const Rect rect = mesh.cell_rect(leaf);
    view.area = rect.area();
    view.h_diameter = rect.diameter();

    // CCW cycle from the lower-left corner; each edge run drops its final
    // node (it starts the next run).
    auto append_run = [&](bool vertical, std::int64_t line, std::int64_t lo,
                          std::int64_t hi, bool reversed) {
      lines.range(vertical, line, lo, hi, /*inclusive=*/true, run);
      if (reversed) std::reverse(run.begin(), run.end());
      view.cycle.insert(view.cycle.end(), run.begin(), run.end() - 1);
    };
    append_run(false, c.y0, c.x0, c.x0 + c.size, false);           // bottom
    append_run(true, c.x0 + c.size, c.y0, c.y0 + c.size, false);   // right
    append_run(false, c.y0 + c.size, c.x0, c.x0 + c.size, true);   // top
    append_run(true, c.x0, c.y0, c.y0 + c.size, true);             // left

    const std::size_t n = view.cycle.size();
    assert(n >= 4);
    view.edge_ids.resize(n);
    view.signs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int u = view.cycle[i];
      const int v = view.cycle[(i + 1) % n];
      const Node& nu = mesh.node(u);
      const Node& nv = mesh.node(v);
      const bool vertical = nu.ix == nv.ix;
      // This leaf is the minus side iff the global normal (rightward /
      // upward) is its outward normal on this edge.
      const bool minus_side = vertical ? (nu.ix == c.x0 + c.size)
                                       : (nu.iy == c.y0 + c.size);
      auto [it, inserted] = edge_lookup.try_emplace(
          edge_key(u, v), static_cast<int>(topo.sub_edges.size()));
      if (inserted) {
        SubEdge e;
        e.vertical = vertical;
        if (vertical) {
          e.a = nu.iy < nv.iy ? u : v;
          e.b = nu.iy < nv.iy ? v : u;
          e.length = to_physical(std::abs(nu.iy - nv.iy));
        } else {
          e.a = nu.ix < nv.ix ? u : v;
          e.b = nu.ix < nv.ix ? v : u;
          e.length = to_physical(std::abs(nu.ix - nv.ix));
        }
        topo.sub_edges.push_back(e);
      }
      SubEdge& e = topo.sub_edges[it->second];
      int& side = minus_side ? e.minus_leaf : e.plus_leaf;
      assert(side < 0);
      side = leaf;
      view.edge_ids[i] = it->second;
      view.signs[i] = minus_side ? 1 : -1;
    }
  }

  for (const SubEdge& e : topo.sub_edges) {
    if (e.on_boundary()) {
      topo.node_on_boundary[e.a] = 1;
      topo.node_on_boundary[e.b] = 1;
    }
  }
  return topo;
}

}  // namespace quadflux
