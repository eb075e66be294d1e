#include "geovag/vag/transmissibility.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

void StencilSet::add(int owner, std::span<const int> dofs, std::span<const double> matrix) {
    owner_.push_back(owner);
    dofs_.insert(dofs_.end(), dofs.begin(), dofs.end());
    offsets_.push_back(static_cast<int>(dofs_.size()));
    matrix_offsets_.push_back(values_.size());
    values_.insert(values_.end(), matrix.begin(), matrix.end());
}

void StencilSet::reserve(std::size_t entities, std::size_t dofs, std::size_t values) {
    owner_.reserve(entities);
    offsets_.reserve(entities + 1);
    matrix_offsets_.reserve(entities);
    dofs_.reserve(dofs);
    values_.reserve(values);
}

namespace {

// A sub-simplex vertex as a combination of local unknowns.
struct VertexMap {
    int count = 0;
    std::array<int, 8> idx{};
    std::array<double, 8> w{};
};

}  // namespace

StencilSet assemble_cell_transmissibilities(const DfmMesh& mesh, const std::vector<Eigen::Matrix3d>& perm) {
    if (perm.size() != mesh.num_cells()) throw AssemblyError("permeability count does not match the cell count");
    const DofLayout layout = DofLayout::of(mesh);
    StencilSet out;
    out.reserve(mesh.num_cells(), mesh.num_cells() * 8, mesh.num_cells() * 64);

    std::vector<int> dofs;
    std::vector<double> local;
    std::vector<Eigen::Vector3d> grad;
    for (int k = 0; k < static_cast<int>(mesh.num_cells()); ++k) {
        const Cell& cell = mesh.cells()[k];
        dofs.clear();
        for (int s : cell.nodes) dofs.push_back(layout.node(s));
        for (int fi : cell.faces)
            if (mesh.faces()[fi].fracture >= 0) dofs.push_back(layout.fracture(mesh.faces()[fi].fracture));
        const int n = static_cast<int>(dofs.size());
        auto node_local = [&](int s) {
            return static_cast<int>(std::find(cell.nodes.begin(), cell.nodes.end(), s) - cell.nodes.begin());
        };

        local.assign(static_cast<std::size_t>(n) * n, 0.0);
        grad.assign(n, Eigen::Vector3d::Zero());
        int frac_local = static_cast<int>(cell.nodes.size());
        const Eigen::Matrix3d& K = perm[k];
        for (int fi : cell.faces) {
            const Face& f = mesh.faces()[fi];
            VertexMap center;
            if (f.fracture >= 0) {
                center.count = 1;
                center.idx[0] = frac_local++;
                center.w[0] = 1.0;
            } else {
                center.count = static_cast<int>(f.nodes.size());
                for (int i = 0; i < center.count; ++i) {
                    center.idx[i] = node_local(f.nodes[i]);
                    center.w[i] = f.weights[i];
                }
            }
            const int m = static_cast<int>(f.nodes.size());
            for (int i = 0; i < m; ++i) {
                const int a = f.nodes[i], b = f.nodes[(i + 1) % m];
                // vertices: x_K (cell unknown, eliminated), x_sigma, a, b
                Eigen::Matrix3d J;
                J.col(0) = f.center - cell.center;
                J.col(1) = mesh.nodes()[a] - cell.center;
                J.col(2) = mesh.nodes()[b] - cell.center;
                const double det = J.determinant();
                const double vol = std::abs(det) / 6.0;
                if (!(vol > 1e-14 * cell.volume)) {
                    std::ostringstream os;
                    os << "degenerate sub-tetrahedron in cell " << k << " (face " << fi << ", edge " << a << "-" << b
                       << ")";
                    throw AssemblyError(os.str());
                }
                // barycentric gradients of x_sigma, a, b
                const Eigen::Matrix3d Jinv = J.inverse();
                const Eigen::Vector3d g_sigma = Jinv.row(0).transpose();
                const Eigen::Vector3d g_a = Jinv.row(1).transpose();
                const Eigen::Vector3d g_b = Jinv.row(2).transpose();

                for (auto& g : grad) g.setZero();
                for (int c = 0; c < center.count; ++c) grad[center.idx[c]] += center.w[c] * g_sigma;
                grad[node_local(a)] += g_a;
                grad[node_local(b)] += g_b;

                std::array<int, 10> touched{};
                int nt = 0;
                for (int c = 0; c < center.count; ++c) touched[nt++] = center.idx[c];
                touched[nt++] = node_local(a);
                touched[nt++] = node_local(b);
                std::sort(touched.begin(), touched.begin() + nt);
                nt = static_cast<int>(std::unique(touched.begin(), touched.begin() + nt) - touched.begin());
                for (int p = 0; p < nt; ++p) {
                    const Eigen::Vector3d kg = K * grad[touched[p]];
                    for (int q = 0; q < nt; ++q)
                        local[static_cast<std::size_t>(touched[p]) * n + touched[q]] += vol * kg.dot(grad[touched[q]]);
                }
            }
        }
        // enforce exact symmetry
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = 0.5 * (local[i * n + j] + local[j * n + i]);
                local[i * n + j] = local[j * n + i] = v;
            }
        out.add(layout.cell(k), dofs, local);
    }
    return out;
}

StencilSet assemble_fracture_transmissibilities(const DfmMesh& mesh, const std::vector<double>& perm_f,
                                                const std::vector<double>& width) {
    const auto nf = mesh.num_fracture_faces();
    if (perm_f.size() != nf || width.size() != nf)
        throw AssemblyError("fracture property count does not match the fracture face count");
    const DofLayout layout = DofLayout::of(mesh);
    StencilSet out;
    std::vector<int> dofs;
    std::vector<double> local;
    for (int j = 0; j < static_cast<int>(nf); ++j) {
        const Face& f = mesh.faces()[mesh.fracture_faces()[j].face];
        const int m = static_cast<int>(f.nodes.size());

        Eigen::Vector3d area_vec = Eigen::Vector3d::Zero();
        double diameter = 0.0;
        for (int i = 0; i < m; ++i) {
            const Vec3& a = mesh.nodes()[f.nodes[i]];
            const Vec3& b = mesh.nodes()[f.nodes[(i + 1) % m]];
            area_vec += (a - f.center).cross(b - f.center);
            for (int l = 0; l < m; ++l) diameter = std::max(diameter, (a - mesh.nodes()[f.nodes[l]]).norm());
        }
        const Eigen::Vector3d normal = area_vec.normalized();
        for (int i = 0; i < m; ++i) {
            const double dist = std::abs((mesh.nodes()[f.nodes[i]] - f.center).dot(normal));
            if (dist > 1e-8 * diameter) {
                std::ostringstream os;
                os << "fracture face " << j << " is not planar (node " << f.nodes[i] << " off plane by " << dist
                   << " m)";
                throw AssemblyError(os.str());
            }
        }

        dofs.clear();
        for (int s : f.nodes) dofs.push_back(layout.node(s));
        local.assign(static_cast<std::size_t>(m) * m, 0.0);
        const double kd = perm_f[j] * width[j];
        for (int i = 0; i < m; ++i) {
            const int ia = i, ib = (i + 1) % m;
            const Vec3& c = f.center;
            const Vec3& a = mesh.nodes()[f.nodes[ia]];
            const Vec3& b = mesh.nodes()[f.nodes[ib]];
            const Eigen::Vector3d nrm = (a - c).cross(b - c);
            const double area2 = nrm.norm();
            if (!(area2 > 1e-14 * diameter * diameter)) {
                throw AssemblyError("degenerate sub-triangle in fracture face " + std::to_string(j));
            }
            const Eigen::Vector3d n = nrm / area2;
            // the face unknown sits at x_sigma and plays the role of the cell unknown
            const Eigen::Vector3d ga = n.cross(c - b) / area2;
            const Eigen::Vector3d gb = n.cross(a - c) / area2;
            const double w = 0.5 * area2 * kd;
            local[ia * m + ia] += w * ga.dot(ga);
            local[ib * m + ib] += w * gb.dot(gb);
            local[ia * m + ib] += w * ga.dot(gb);
            local[ib * m + ia] += w * ga.dot(gb);
        }
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) {
                const double v = 0.5 * (local[p * m + q] + local[q * m + p]);
                local[p * m + q] = local[q * m + p] = v;
            }
        out.add(layout.fracture(j), dofs, local);
    }
    return out;
}

TransmissibilitySet assemble_transmissibilities(const DfmMesh& mesh, const std::vector<Eigen::Matrix3d>& perm,
                                                const std::vector<double>& fracture_perm) {
    TransmissibilitySet t;
    t.layout = DofLayout::of(mesh);
    t.cell_darcy = assemble_cell_transmissibilities(mesh, perm);
    t.cell_geometric =
        assemble_cell_transmissibilities(mesh, std::vector<Eigen::Matrix3d>(mesh.num_cells(), Eigen::Matrix3d::Identity()));
    std::vector<double> width(mesh.num_fracture_faces());
    for (std::size_t j = 0; j < width.size(); ++j) width[j] = mesh.fracture_faces()[j].width;
    t.fracture_darcy = assemble_fracture_transmissibilities(mesh, fracture_perm, width);
    t.fracture_geometric = assemble_fracture_transmissibilities(mesh, std::vector<double>(width.size(), 1.0), width);
    return t;
}

std::vector<double> evaluate_fluxes(const StencilSet& st, std::span<const double> u) {
    std::vector<double> flux(static_cast<std::size_t>(st.num_fluxes()), 0.0);
    for (int e = 0; e < st.size(); ++e) {
        const auto dofs = st.dofs(e);
        const int n = static_cast<int>(dofs.size());
        const double uk = u[st.owner(e)];
        const double* T = st.matrix(e);
        double* F = flux.data() + st.flux_offset(e);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += T[i * n + j] * (uk - u[dofs[j]]);
            F[i] = acc;
        }
    }
    return flux;
}

ControlVolumes distribute_volumes(const DfmMesh& mesh, const std::vector<double>& cell_porosity,
                                  const std::vector<double>& fracture_porosity, const VolumeFractions& fractions,
                                  const std::vector<char>& dirichlet,
                                  const std::vector<double>& cell_heat_capacity,
                                  const std::vector<double>& fracture_heat_capacity) {
    if (cell_porosity.size() != mesh.num_cells() || fracture_porosity.size() != mesh.num_fracture_faces())
        throw ConfigError("porosity count does not match the mesh");
    if (dirichlet.size() != mesh.num_nodes()) throw ConfigError("dirichlet mask size does not match the node count");
    if (fractions.omega < 0.0 || fractions.omega_f < 0.0) throw ConfigError("volume fractions must be non-negative");
    const DofLayout layout = DofLayout::of(mesh);
    ControlVolumes v;
    v.porous.assign(layout.total(), 0.0);
    v.rock.assign(layout.total(), 0.0);
    v.rock_heat.assign(layout.total(), 0.0);
    const bool with_heat = !cell_heat_capacity.empty();
    if (with_heat && (cell_heat_capacity.size() != mesh.num_cells() ||
                      fracture_heat_capacity.size() != mesh.num_fracture_faces()))
        throw ConfigError("heat capacity count does not match the mesh");

    for (int k = 0; k < layout.cells; ++k) {
        const Cell& c = mesh.cells()[k];
        const double phi = cell_porosity[k];
        if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("cell porosity must lie in (0, 1]");
        int eligible = 0;
        for (int s : c.nodes)
            if (!dirichlet[s] && !mesh.is_fracture_node(s)) ++eligible;
        const double sum = eligible * fractions.omega;
        if (sum > 1.0) throw ConfigError("matrix volume fractions sum to more than 1 in cell " + std::to_string(k));
        const double pore = phi * c.volume, rock = (1.0 - phi) * c.volume;
        const double heat = with_heat ? rock * cell_heat_capacity[k] : 0.0;
        for (int s : c.nodes)
            if (!dirichlet[s] && !mesh.is_fracture_node(s)) {
                v.porous[layout.node(s)] += fractions.omega * pore;
                v.rock[layout.node(s)] += fractions.omega * rock;
                v.rock_heat[layout.node(s)] += fractions.omega * heat;
            }
        v.porous[layout.cell(k)] = (1.0 - sum) * pore;
        v.rock[layout.cell(k)] = (1.0 - sum) * rock;
        v.rock_heat[layout.cell(k)] = (1.0 - sum) * heat;
    }
    for (int j = 0; j < layout.fractures; ++j) {
        const auto& ff = mesh.fracture_faces()[j];
        const Face& f = mesh.faces()[ff.face];
        const double phi = fracture_porosity[j];
        if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("fracture porosity must lie in (0, 1]");
        int eligible = 0;
        for (int s : f.nodes)
            if (!dirichlet[s]) ++eligible;
        const double sum = eligible * fractions.omega_f;
        if (sum > 1.0) throw ConfigError("fracture volume fractions sum to more than 1 on face " + std::to_string(j));
        const double bulk = ff.width * f.area;
        const double pore = phi * bulk, rock = (1.0 - phi) * bulk;
        const double heat = with_heat ? rock * fracture_heat_capacity[j] : 0.0;
        for (int s : f.nodes)
            if (!dirichlet[s]) {
                v.porous[layout.node(s)] += fractions.omega_f * pore;
                v.rock[layout.node(s)] += fractions.omega_f * rock;
                v.rock_heat[layout.node(s)] += fractions.omega_f * heat;
            }
        v.porous[layout.fracture(j)] = (1.0 - sum) * pore;
        v.rock[layout.fracture(j)] = (1.0 - sum) * rock;
        v.rock_heat[layout.fracture(j)] = (1.0 - sum) * heat;
    }
    return v;
}

}  // namespace geovag
