#pragma once

#include <string>

#include "quadflux/mesh.hpp"

namespace quadflux {

// Legacy ASCII VTK unstructured grid: all nodes as points, leaves as 4-node
// quads on their generation vertices. Hanging nodes come out as unused points,
// which is the usual nonconforming-view export. Optional point scalar "u".
std::string to_vtk(const QuadtreeMesh& mesh, const double* point_data = nullptr,
                   std::size_t point_data_size = 0);
void write_vtk(const std::string& path, const QuadtreeMesh& mesh,
               const double* point_data = nullptr, std::size_t point_data_size = 0);

// Full topology dump (nodes, leaves, sub-edges, classification) for golden
// file tests. Byte-identical for identical refinement histories.
std::string topology_json(const QuadtreeMesh& mesh, const MeshTopology& topo);
void write_topology_json(const std::string& path, const QuadtreeMesh& mesh,
                         const MeshTopology& topo);

}  // namespace quadflux
