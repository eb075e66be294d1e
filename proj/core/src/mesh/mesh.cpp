#include "geovag/mesh/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return std::abs((b - a).dot((c - a).cross(d - a))) / 6.0;
}

template <class Range>
std::string join(const Range& r) {
    std::ostringstream os;
    bool first = true;
    for (const auto& v : r) {
        if (!first) os << ' ';
        os << v;
        first = false;
    }
    return os.str();
}

}  // namespace

int node_count(CellShape shape) {
    switch (shape) {
        case CellShape::Tetrahedron: return 4;
        case CellShape::Pyramid: return 5;
        case CellShape::Wedge: return 6;
        case CellShape::Hexahedron: return 8;
    }
    return 0;
}

CellShape shape_from_node_count(int n) {
    switch (n) {
        case 4: return CellShape::Tetrahedron;
        case 5: return CellShape::Pyramid;
        case 6: return CellShape::Wedge;
        case 8: return CellShape::Hexahedron;
        default: break;
    }
    throw ValidationError("unsupported cell with " + std::to_string(n) + " nodes (expected 4, 5, 6 or 8)");
}

const std::vector<std::vector<int>>& local_faces(CellShape shape) {
    static const std::vector<std::vector<int>> tet{{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    static const std::vector<std::vector<int>> pyr{{0, 3, 2, 1}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    static const std::vector<std::vector<int>> wedge{{0, 1, 2}, {3, 5, 4}, {0, 3, 4, 1}, {1, 4, 5, 2}, {2, 5, 3, 0}};
    static const std::vector<std::vector<int>> hex{{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                                   {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    switch (shape) {
        case CellShape::Tetrahedron: return tet;
        case CellShape::Pyramid: return pyr;
        case CellShape::Wedge: return wedge;
        case CellShape::Hexahedron: return hex;
    }
    return hex;
}

int vtk_cell_type(CellShape shape) {
    switch (shape) {
        case CellShape::Tetrahedron: return 10;
        case CellShape::Pyramid: return 14;
        case CellShape::Wedge: return 13;
        case CellShape::Hexahedron: return 12;
    }
    return 0;
}

DfmMesh DfmMesh::build(MeshDescription desc) {
    DfmMesh m;
    m.nodes_ = std::move(desc.nodes);
    m.build_topology(desc);
    m.compute_geometry();
    m.build_adjacency();
    m.check_convexity();
    m.node_sets_ = std::move(desc.node_sets);
    m.wells_ = std::move(desc.wells);

    const int n = static_cast<int>(m.nodes_.size());
    for (const auto& [tag, set] : m.node_sets_) {
        std::vector<int> bad;
        for (int s : set)
            if (s < 0 || s >= n) bad.push_back(s);
        if (!bad.empty()) throw ValidationError("node set '" + tag + "' references missing nodes: " + join(bad));
    }
    for (auto& [tag, set] : m.node_sets_) {
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
    }
    for (const auto& w : m.wells_) {
        for (const auto& e : w.edges)
            if (e[0] < 0 || e[0] >= n || e[1] < 0 || e[1] >= n)
                throw ValidationError("well '" + w.name + "' references missing nodes");
    }

    // Duplicate coordinates are reported, not rejected.
    if (n > 1) {
        Vec3 lo = m.nodes_[0], hi = m.nodes_[0];
        for (const auto& x : m.nodes_) {
            lo = lo.cwiseMin(x);
            hi = hi.cwiseMax(x);
        }
        const double tol = 1e-10 * std::max((hi - lo).norm(), 1e-300);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return m.nodes_[a].x() < m.nodes_[b].x(); });
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n && m.nodes_[order[j]].x() - m.nodes_[order[i]].x() <= tol; ++j) {
                if ((m.nodes_[order[j]] - m.nodes_[order[i]]).norm() <= tol) {
                    std::ostringstream os;
                    os << "duplicate node coordinates: nodes " << std::min(order[i], order[j]) << " and "
                       << std::max(order[i], order[j]);
                    m.warnings_.push_back(os.str());
                }
            }
        }
    }
    return m;
}

void DfmMesh::build_topology(const MeshDescription& desc) {
    const int n = static_cast<int>(nodes_.size());
    cells_.reserve(desc.cells.size());
    std::vector<int> bad_cells;
    for (std::size_t k = 0; k < desc.cells.size(); ++k) {
        const auto& def = desc.cells[k];
        if (static_cast<int>(def.nodes.size()) != node_count(def.shape)) bad_cells.push_back(static_cast<int>(k));
        for (int s : def.nodes)
            if (s < 0 || s >= n) bad_cells.push_back(static_cast<int>(k));
    }
    if (!bad_cells.empty()) {
        bad_cells.erase(std::unique(bad_cells.begin(), bad_cells.end()), bad_cells.end());
        throw ValidationError("cells with invalid node lists: " + join(bad_cells));
    }

    for (std::size_t k = 0; k < desc.cells.size(); ++k) {
        const auto& def = desc.cells[k];
        Cell cell;
        cell.shape = def.shape;
        cell.nodes = def.nodes;
        for (const auto& loop : local_faces(def.shape)) {
            std::vector<int> fn;
            fn.reserve(loop.size());
            for (int l : loop) fn.push_back(def.nodes[l]);
            std::vector<int> key = fn;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = face_lookup_.try_emplace(key, static_cast<int>(faces_.size()));
            if (inserted) {
                Face f;
                f.nodes = fn;
                f.weights.assign(fn.size(), 1.0 / static_cast<double>(fn.size()));
                faces_.push_back(std::move(f));
            }
            Face& f = faces_[it->second];
            if (f.cells[0] < 0) {
                f.cells[0] = static_cast<int>(k);
            } else if (f.cells[1] < 0) {
                f.cells[1] = static_cast<int>(k);
            } else {
                throw ValidationError("face {" + join(key) + "} shared by more than two cells");
            }
            cell.faces.push_back(it->second);
        }
        cells_.push_back(std::move(cell));
    }

    for (const auto& f : faces_) {
        for (std::size_t i = 0; i < f.nodes.size(); ++i) {
            const int a = f.nodes[i];
            const int b = f.nodes[(i + 1) % f.nodes.size()];
            auto [it, inserted] = edge_lookup_.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
            if (inserted) edges_.push_back({std::min(a, b), std::max(a, b)});
        }
    }

    for (const auto& w : desc.face_weights) {
        const int fi = find_face(w.nodes);
        if (fi < 0) throw ValidationError("face weights reference a non-existent face {" + join(w.nodes) + "}");
        if (w.weights.size() != w.nodes.size()) throw ValidationError("face weight count mismatch");
        double sum = 0.0;
        for (double b : w.weights) {
            if (b < 0.0) throw ValidationError("negative face center weight on face {" + join(w.nodes) + "}");
            sum += b;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("face center weights must sum to 1");
        Face& f = faces_[fi];
        for (std::size_t i = 0; i < w.nodes.size(); ++i) {
            auto pos = std::find(f.nodes.begin(), f.nodes.end(), w.nodes[i]);
            f.weights[static_cast<std::size_t>(pos - f.nodes.begin())] = w.weights[i];
        }
    }

    std::vector<std::string> offending;
    for (std::size_t i = 0; i < desc.fractures.size(); ++i) {
        const auto& fr = desc.fractures[i];
        bool missing = false;
        for (int s : fr.nodes)
            if (s < 0 || s >= n) missing = true;
        const int fi = missing ? -1 : find_face(fr.nodes);
        if (fi < 0) {
            offending.push_back("#" + std::to_string(i) + " {" + join(fr.nodes) + "}");
            continue;
        }
        if (!(fr.width > 0.0)) throw ValidationError("fracture face #" + std::to_string(i) + " has non-positive width");
        if (faces_[fi].fracture >= 0) throw ValidationError("fracture face #" + std::to_string(i) + " declared twice");
        faces_[fi].fracture = static_cast<int>(fracture_faces_.size());
        fracture_faces_.push_back({fi, fr.width, fr.plane});
    }
    if (!offending.empty()) {
        std::ostringstream os;
        os << "non-conforming fracture faces (no matching mesh face): ";
        for (std::size_t i = 0; i < offending.size(); ++i) os << (i ? ", " : "") << offending[i];
        throw ValidationError(os.str());
    }
}

void DfmMesh::compute_geometry() {
    for (auto& f : faces_) {
        f.center.setZero();
        for (std::size_t i = 0; i < f.nodes.size(); ++i) f.center += f.weights[i] * nodes_[f.nodes[i]];
        f.area = 0.0;
        for (std::size_t i = 0; i < f.nodes.size(); ++i) {
            const Vec3& a = nodes_[f.nodes[i]];
            const Vec3& b = nodes_[f.nodes[(i + 1) % f.nodes.size()]];
            f.area += 0.5 * (a - f.center).cross(b - f.center).norm();
        }
    }
    std::vector<int> degenerate;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        auto& c = cells_[k];
        c.center.setZero();
        for (int s : c.nodes) c.center += nodes_[s];
        c.center /= static_cast<double>(c.nodes.size());
        c.volume = 0.0;
        for (int fi : c.faces) {
            const Face& f = faces_[fi];
            for (std::size_t i = 0; i < f.nodes.size(); ++i) {
                c.volume += tet_volume(c.center, f.center, nodes_[f.nodes[i]], nodes_[f.nodes[(i + 1) % f.nodes.size()]]);
            }
        }
        if (!(c.volume > 0.0)) degenerate.push_back(static_cast<int>(k));
    }
    if (!degenerate.empty()) throw GeometryError("cells with zero volume: " + join(degenerate));
}

void DfmMesh::build_adjacency() {
    const int n = static_cast<int>(nodes_.size());
    node_cells_offsets_.assign(n + 1, 0);
    for (const auto& c : cells_)
        for (int s : c.nodes) ++node_cells_offsets_[s + 1];
    std::partial_sum(node_cells_offsets_.begin(), node_cells_offsets_.end(), node_cells_offsets_.begin());
    node_cells_.assign(node_cells_offsets_.back(), -1);
    {
        std::vector<int> fill(node_cells_offsets_.begin(), node_cells_offsets_.end() - 1);
        for (std::size_t k = 0; k < cells_.size(); ++k)
            for (int s : cells_[k].nodes) node_cells_[fill[s]++] = static_cast<int>(k);
    }

    fracture_node_.assign(n, 0);
    node_ff_offsets_.assign(n + 1, 0);
    for (const auto& ff : fracture_faces_)
        for (int s : faces_[ff.face].nodes) {
            ++node_ff_offsets_[s + 1];
            fracture_node_[s] = 1;
        }
    std::partial_sum(node_ff_offsets_.begin(), node_ff_offsets_.end(), node_ff_offsets_.begin());
    node_ff_.assign(node_ff_offsets_.back(), -1);
    std::vector<int> fill(node_ff_offsets_.begin(), node_ff_offsets_.end() - 1);
    for (std::size_t j = 0; j < fracture_faces_.size(); ++j)
        for (int s : faces_[fracture_faces_[j].face].nodes) node_ff_[fill[s]++] = static_cast<int>(j);
}

void DfmMesh::check_convexity() {
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const auto& c = cells_[k];
        bool convex = true;
        for (int fi : c.faces) {
            const Face& f = faces_[fi];
            Vec3 normal = Vec3::Zero();
            for (std::size_t i = 0; i < f.nodes.size(); ++i) {
                const Vec3& a = nodes_[f.nodes[i]];
                const Vec3& b = nodes_[f.nodes[(i + 1) % f.nodes.size()]];
                normal += (a - f.center).cross(b - f.center);
            }
            const double ref = (c.center - f.center).dot(normal);
            const double scale = normal.norm() * std::cbrt(c.volume) * 1e-9;
            for (int s : c.nodes) {
                if (std::find(f.nodes.begin(), f.nodes.end(), s) != f.nodes.end()) continue;
                const double side = (nodes_[s] - f.center).dot(normal);
                if (side * ref < 0.0 && std::abs(side) > scale) convex = false;
            }
        }
        if (!convex) warnings_.push_back("cell " + std::to_string(k) + " is not convex");
    }
}

std::span<const int> DfmMesh::node_cells(int s) const {
    return {node_cells_.data() + node_cells_offsets_[s],
            static_cast<std::size_t>(node_cells_offsets_[s + 1] - node_cells_offsets_[s])};
}

std::span<const int> DfmMesh::node_fracture_faces(int s) const {
    return {node_ff_.data() + node_ff_offsets_[s], static_cast<std::size_t>(node_ff_offsets_[s + 1] - node_ff_offsets_[s])};
}

int DfmMesh::find_edge(int a, int b) const {
    auto it = edge_lookup_.find(edge_key(a, b));
    return it == edge_lookup_.end() ? -1 : it->second;
}

int DfmMesh::find_face(std::vector<int> nodes) const {
    std::sort(nodes.begin(), nodes.end());
    auto it = face_lookup_.find(nodes);
    return it == face_lookup_.end() ? -1 : it->second;
}

const std::vector<int>& DfmMesh::node_set(const std::string& tag) const {
    auto it = node_sets_.find(tag);
    if (it == node_sets_.end()) throw ConfigError("unknown node set '" + tag + "'");
    return it->second;
}

double DfmMesh::total_volume() const {
    double v = 0.0;
    for (const auto& c : cells_) v += c.volume;
    return v;
}

DfmMesh build_cartesian_mesh(int nx, int ny, int nz, const Box& box) {
    if (nx < 1 || ny < 1 || nz < 1) throw GeometryError("cartesian mesh needs nx, ny, nz >= 1");
    const Vec3 ext = box.max - box.min;
    if (!(ext.x() > 0.0 && ext.y() > 0.0 && ext.z() > 0.0)) throw GeometryError("cartesian box has zero extent");

    MeshDescription d;
    const int sx = nx + 1, sy = ny + 1, sz = nz + 1;
    auto id = [&](int i, int j, int k) { return i + sx * (j + sy * k); };
    d.nodes.reserve(static_cast<std::size_t>(sx) * sy * sz);
    for (int k = 0; k < sz; ++k)
        for (int j = 0; j < sy; ++j)
            for (int i = 0; i < sx; ++i) {
                // exact end points on the box sides
                auto coord = [](double lo, double hi, int i, int n) {
                    return i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
                };
                d.nodes.emplace_back(coord(box.min.x(), box.max.x(), i, nx), coord(box.min.y(), box.max.y(), j, ny),
                                     coord(box.min.z(), box.max.z(), k, nz));
            }
    d.cells.reserve(static_cast<std::size_t>(nx) * ny * nz);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                d.cells.push_back({CellShape::Hexahedron,
                                   {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k),
                                    id(i, j, k + 1), id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)}});
            }
    auto& xmin = d.node_sets["xmin"];
    auto& xmax = d.node_sets["xmax"];
    auto& ymin = d.node_sets["ymin"];
    auto& ymax = d.node_sets["ymax"];
    auto& zmin = d.node_sets["zmin"];
    auto& zmax = d.node_sets["zmax"];
    for (int k = 0; k < sz; ++k)
        for (int j = 0; j < sy; ++j)
            for (int i = 0; i < sx; ++i) {
                const int s = id(i, j, k);
                if (i == 0) xmin.push_back(s);
                if (i == nx) xmax.push_back(s);
                if (j == 0) ymin.push_back(s);
                if (j == ny) ymax.push_back(s);
                if (k == 0) zmin.push_back(s);
                if (k == nz) zmax.push_back(s);
            }
    return DfmMesh::build(std::move(d));
}

std::vector<std::array<int, 2>> vertical_line_edges(const DfmMesh& mesh, double x, double y, double tol) {
    std::vector<int> line;
    for (std::size_t s = 0; s < mesh.num_nodes(); ++s) {
        const Vec3& p = mesh.nodes()[s];
        if (std::abs(p.x() - x) <= tol && std::abs(p.y() - y) <= tol) line.push_back(static_cast<int>(s));
    }
    if (line.empty()) throw GeometryError("no mesh node on the vertical line through the requested point");
    std::sort(line.begin(), line.end(), [&](int a, int b) { return mesh.nodes()[a].z() > mesh.nodes()[b].z(); });
    std::vector<std::array<int, 2>> edges;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) edges.push_back({line[i], line[i + 1]});
    return edges;
}

}  // namespace geovag
