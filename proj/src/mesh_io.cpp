#include "quadflux/mesh_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace quadflux {

namespace {

void put_double(std::ostream& os, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  os.write(buf, n);
}

}  // namespace

std::string to_vtk(const QuadtreeMesh& mesh, const double* point_data,
                   std::size_t point_data_size) {
  const auto leaves = mesh.leaf_ids();
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n";
  os << "quadflux quadtree mesh\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.n_nodes() << " double\n";
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    const Vec2 p = mesh.node_xy(static_cast<int>(i));
    put_double(os, p.x);
    os << ' ';
    put_double(os, p.y);
    os << " 0\n";
  }
  os << "CELLS " << leaves.size() << ' ' << 5 * leaves.size() << '\n';
  for (int leaf : leaves) {
    const auto corners = mesh.cell_corner_nodes(leaf);
    os << "4 " << corners[0] << ' ' << corners[1] << ' ' << corners[2] << ' '
       << corners[3] << '\n';
  }
  os << "CELL_TYPES " << leaves.size() << '\n';
  for (std::size_t i = 0; i < leaves.size(); ++i) os << "9\n";
  if (point_data != nullptr) {
    if (point_data_size != mesh.n_nodes()) {
      throw std::invalid_argument("point data size does not match node count");
    }
    os << "POINT_DATA " << mesh.n_nodes() << '\n';
    os << "SCALARS u double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < point_data_size; ++i) {
      put_double(os, point_data[i]);
      os << '\n';
    }
  }
  return os.str();
}

void write_vtk(const std::string& path, const QuadtreeMesh& mesh,
               const double* point_data, std::size_t point_data_size) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << to_vtk(mesh, point_data, point_data_size);
}

std::string topology_json(const QuadtreeMesh& mesh, const MeshTopology& topo) {
  nlohmann::ordered_json j;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    const int id = static_cast<int>(i);
    const Vec2 p = mesh.node_xy(id);
    nodes.push_back({{"id", id},
                     {"x", p.x},
                     {"y", p.y},
                     {"hanging", static_cast<bool>(topo.classes.hanging[i])},
                     {"masters", topo.classes.masters[i]},
                     {"boundary", static_cast<bool>(topo.node_on_boundary[i])}});
  }
  auto& leaves = j["leaves"] = nlohmann::ordered_json::array();
  for (int leaf : topo.leaf_ids) {
    const Cell& c = mesh.cell(leaf);
    const Rect r = mesh.cell_rect(leaf);
    leaves.push_back({{"id", leaf},
                      {"level", c.level},
                      {"x0", r.x0},
                      {"y0", r.y0},
                      {"x1", r.x1},
                      {"y1", r.y1}});
  }
  auto& edges = j["sub_edges"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < topo.sub_edges.size(); ++i) {
    const SubEdge& e = topo.sub_edges[i];
    edges.push_back({{"id", static_cast<int>(i)},
                     {"a", e.a},
                     {"b", e.b},
                     {"normal", e.vertical ? "x" : "y"},
                     {"h", e.length},
                     {"minus", e.minus_leaf},
                     {"plus", e.plus_leaf}});
  }
  return j.dump(1);
}

void write_topology_json(const std::string& path, const QuadtreeMesh& mesh,
                         const MeshTopology& topo) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << topology_json(mesh, topo) << '\n';
}

}  // namespace quadflux
