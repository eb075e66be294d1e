#pragma once

#include <random>
#include <string>

#include "geovag/mesh/mesh.hpp"

namespace geovag::fixtures {

// Cartesian mesh with interior nodes moved randomly by up to `amplitude` of the cell size.
inline DfmMesh perturbed_hex_mesh(int nx, int ny, int nz, double amplitude, unsigned seed) {
    const auto base = build_cartesian_mesh(nx, ny, nz, Box{Vec3::Zero(), Vec3(nx, ny, nz)});
    MeshDescription d;
    d.nodes = base.nodes();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    for (auto& x : d.nodes) {
        const bool interior = x.x() > 0 && x.x() < nx && x.y() > 0 && x.y() < ny && x.z() > 0 && x.z() < nz;
        if (interior) x += Vec3(u(rng), u(rng), u(rng));
    }
    for (const auto& c : base.cells()) d.cells.push_back({c.shape, c.nodes});
    d.node_sets = base.node_sets();
    return DfmMesh::build(std::move(d));
}

// Two unit cubes side by side along x with the shared face x = 1 as a fracture.
inline const char* two_hex_fracture_text() {
    return R"(NODES 12
0 0 0
1 0 0
2 0 0
0 1 0
1 1 0
2 1 0
0 0 1
1 0 1
2 0 1
0 1 1
1 1 1
2 1 1
CELLS 2
8 0 1 4 3 6 7 10 9
8 1 2 5 4 7 8 11 10
FRACTURE_FACES 1
4 1 4 10 7 0.1
)";
}

// 2x2x1 unit cubes with the plane x = 1 as a fracture made of two faces.
inline DfmMesh fractured_block() {
    auto base = build_cartesian_mesh(2, 2, 1, Box{Vec3::Zero(), Vec3(2, 2, 1)});
    MeshDescription d;
    d.nodes = base.nodes();
    for (const auto& c : base.cells()) d.cells.push_back({c.shape, c.nodes});
    d.node_sets = base.node_sets();
    for (const auto& f : base.faces()) {
        bool on_plane = true;
        for (int s : f.nodes) on_plane = on_plane && std::abs(base.nodes()[s].x() - 1.0) < 1e-12;
        if (on_plane) d.fractures.push_back({f.nodes, 0.01, 0});
    }
    return DfmMesh::build(std::move(d));
}

}  // namespace geovag::fixtures
