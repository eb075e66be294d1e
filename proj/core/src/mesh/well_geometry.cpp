#include "geovag/mesh/well_geometry.hpp"

#include <algorithm>
#include <unordered_map>

#include "geovag/error.hpp"

namespace geovag {

int WellGeometry::local_index(int mesh_node) const {
    auto it = std::find(nodes.begin(), nodes.end(), mesh_node);
    return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

double WellGeometry::node_length(int local) const {
    double l = edge_length[local];
    for (int c : children[local]) l += edge_length[c];
    return 0.5 * l;
}

WellGeometry build_well(const DfmMesh& mesh, const std::vector<std::array<int, 2>>& edges, double radius,
                        std::string name) {
    if (!(radius > 0.0)) throw ValidationError("well '" + name + "': radius must be positive");
    if (edges.empty()) throw TreeError("well '" + name + "' has no edges");

    std::unordered_map<int, int> parent_of;
    std::unordered_map<int, std::vector<int>> children_of;
    std::vector<int> order_seen;
    auto see = [&](int s) {
        if (!children_of.count(s)) {
            children_of[s];
            order_seen.push_back(s);
        }
    };
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= static_cast<int>(mesh.num_nodes()) || b >= static_cast<int>(mesh.num_nodes()))
            throw GeometryError("well '" + name + "': node index out of range");
        if (mesh.find_edge(a, b) < 0)
            throw GeometryError("well '" + name + "': (" + std::to_string(a) + ", " + std::to_string(b) +
                                ") is not a mesh edge");
        see(a);
        see(b);
        if (parent_of.count(b))
            throw TreeError("well '" + name + "': node " + std::to_string(b) + " has two parents");
        parent_of[b] = a;
        children_of[a].push_back(b);
    }
    std::vector<int> roots;
    for (int s : order_seen)
        if (!parent_of.count(s)) roots.push_back(s);
    if (roots.empty()) throw TreeError("well '" + name + "': edges form a cycle (no root)");
    if (roots.size() > 1) throw TreeError("well '" + name + "': more than one root");

    WellGeometry w;
    w.name = std::move(name);
    w.radius = radius;
    std::unordered_map<int, int> local;
    std::vector<int> queue{roots[0]};
    local[roots[0]] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const int s = queue[i];
        for (int c : children_of[s]) {
            if (local.count(c)) throw TreeError("well '" + w.name + "': edges form a cycle");
            local[c] = static_cast<int>(queue.size());
            queue.push_back(c);
        }
    }
    if (queue.size() != order_seen.size()) throw TreeError("well '" + w.name + "': edges form a cycle");

    const std::size_t n = queue.size();
    w.nodes = queue;
    w.parent.assign(n, -1);
    w.children.assign(n, {});
    w.z.resize(n);
    w.edge_length.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int s = queue[i];
        w.z[i] = mesh.nodes()[s].z();
        if (i > 0) {
            const int p = local[parent_of[s]];
            w.parent[i] = p;
            w.children[p].push_back(static_cast<int>(i));
            w.edge_length[i] = (mesh.nodes()[s] - mesh.nodes()[w.nodes[p]]).norm();
        }
    }
    return w;
}

WellGeometry single_node_well(const DfmMesh& mesh, int node, double radius, std::string name) {
    if (node < 0 || node >= static_cast<int>(mesh.num_nodes())) throw GeometryError("well node out of range");
    if (!(radius > 0.0)) throw ValidationError("well '" + name + "': radius must be positive");
    WellGeometry w;
    w.name = std::move(name);
    w.radius = radius;
    w.nodes = {node};
    w.parent = {-1};
    w.children = {{}};
    w.z = {mesh.nodes()[node].z()};
    w.edge_length = {0.0};
    return w;
}

void check_disjoint_wells(const std::vector<WellGeometry>& wells) {
    std::unordered_map<int, std::size_t> owner;
    for (std::size_t i = 0; i < wells.size(); ++i)
        for (int s : wells[i].nodes) {
            auto [it, ok] = owner.emplace(s, i);
            if (!ok)
                throw TreeError("wells '" + wells[it->second].name + "' and '" + wells[i].name + "' share node " +
                                std::to_string(s));
        }
}

}  // namespace geovag
