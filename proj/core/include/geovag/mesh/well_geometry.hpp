#pragma once

#include <array>
#include <string>
#include <vector>

#include "geovag/mesh/mesh.hpp"

namespace geovag {

/// Rooted well tree on mesh nodes. Local node 0 is the root and every node
/// appears after its parent, so a forward loop is a root-to-leaf sweep and a
/// backward loop is leaf-to-root.
struct WellGeometry {
    std::string name;
    double radius = 0.0;              // m
    std::vector<int> nodes;           // mesh node per local node
    std::vector<int> parent;          // local parent, -1 for the root
    std::vector<std::vector<int>> children;
    std::vector<double> z;            // m
    std::vector<double> edge_length;  // length of the edge to the parent, 0 at root

    std::size_t size() const { return nodes.size(); }
    int root() const { return nodes.empty() ? -1 : nodes[0]; }
    int local_index(int mesh_node) const;
    /// Half-sum of the lengths of the edges incident to a local node.
    double node_length(int local) const;
};

/// Throws TreeError for cycles, several roots or nodes with two parents and
/// GeometryError for pairs that are not mesh edges.
WellGeometry build_well(const DfmMesh& mesh, const std::vector<std::array<int, 2>>& edges, double radius,
                        std::string name = "well");

WellGeometry single_node_well(const DfmMesh& mesh, int node, double radius, std::string name = "well");

/// Throws TreeError if two wells share a node.
void check_disjoint_wells(const std::vector<WellGeometry>& wells);

}  // namespace geovag
