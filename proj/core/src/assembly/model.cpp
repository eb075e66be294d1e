#include "geovag/assembly/model.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

RockField RockField::uniform(const DfmMesh& mesh, double perm, double porosity, double conductivity,
                             double heat_capacity) {
    RockField r;
    const auto nc = mesh.num_cells(), nf = mesh.num_fracture_faces();
    r.cell_perm.assign(nc, perm * Eigen::Matrix3d::Identity());
    r.cell_porosity.assign(nc, porosity);
    r.cell_conductivity.assign(nc, conductivity);
    r.cell_heat_capacity.assign(nc, heat_capacity);
    r.fracture_perm.assign(nf, perm);
    r.fracture_porosity.assign(nf, porosity);
    r.fracture_conductivity.assign(nf, conductivity);
    r.fracture_heat_capacity.assign(nf, heat_capacity);
    return r;
}

void RockField::validate(const DfmMesh& mesh) const {
    const auto nc = mesh.num_cells(), nf = mesh.num_fracture_faces();
    if (cell_perm.size() != nc || cell_porosity.size() != nc || cell_conductivity.size() != nc ||
        cell_heat_capacity.size() != nc)
        throw ConfigError("rock: cell property count does not match the mesh");
    if (fracture_perm.size() != nf || fracture_porosity.size() != nf || fracture_conductivity.size() != nf ||
        fracture_heat_capacity.size() != nf)
        throw ConfigError("rock: fracture property count does not match the mesh");
    for (std::size_t k = 0; k < nc; ++k) {
        const Eigen::Matrix3d& K = cell_perm[k];
        if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * K.cwiseAbs().maxCoeff() || K.llt().info() != Eigen::Success)
            throw ConfigError("rock: permeability of cell " + std::to_string(k) + " is not symmetric positive definite");
        if (cell_conductivity[k] < 0.0 || cell_heat_capacity[k] < 0.0)
            throw ConfigError("rock: negative conductivity or heat capacity");
    }
    for (std::size_t j = 0; j < nf; ++j)
        if (!(fracture_perm[j] > 0.0)) throw ConfigError("rock: fracture permeability must be positive");
}

double effective_conductivity(double porosity, double rock, const FluidConductivity& fluid, double sl, double sg) {
    return porosity * (sl * fluid.liquid + sg * fluid.gas) + (1.0 - porosity) * rock;
}

FlowModel::FlowModel(const DfmMesh& mesh, RockField rock, FluidEos eos, Vec3 gravity, VolumeFractions fractions,
                     FluidConductivity fluid_conductivity, DirichletData dirichlet, std::vector<Well> wells,
                     ResidualScaling scaling)
    : mesh_(&mesh),
      rock_(std::move(rock)),
      eos_(std::move(eos)),
      gravity_(gravity),
      fractions_(fractions),
      fluid_conductivity_(fluid_conductivity),
      dirichlet_(std::move(dirichlet)),
      wells_(std::move(wells)),
      scaling_(scaling) {
    rock_.validate(mesh);
    trans_ = assemble_transmissibilities(mesh, rock_.cell_perm, rock_.fracture_perm);
    finish();
}

FlowModel FlowModel::with_stage(DirichletData dirichlet, std::vector<Well> wells) const {
    FlowModel m = *this;
    m.dirichlet_ = std::move(dirichlet);
    m.wells_ = std::move(wells);
    m.finish();
    return m;
}

void FlowModel::finish() {
    const DofLayout& L = trans_.layout;
    if (dirichlet_.mask.empty()) dirichlet_.mask.assign(L.nodes, 0);
    if (dirichlet_.values.empty()) dirichlet_.values.assign(L.nodes, DofState{});
    if (static_cast<int>(dirichlet_.mask.size()) != L.nodes || static_cast<int>(dirichlet_.values.size()) != L.nodes)
        throw ConfigError("dirichlet data size does not match the node count");
    volumes_ = distribute_volumes(*mesh_, rock_.cell_porosity, rock_.fracture_porosity, fractions_, dirichlet_.mask,
                                  rock_.cell_heat_capacity, rock_.fracture_heat_capacity);

    gravity_potential_.assign(L.total(), 0.0);
    for (int s = 0; s < L.nodes; ++s) gravity_potential_[L.node(s)] = gravity_.dot(mesh_->nodes()[s]);
    for (int j = 0; j < L.fractures; ++j)
        gravity_potential_[L.fracture(j)] = gravity_.dot(mesh_->faces()[mesh_->fracture_faces()[j].face].center);
    for (int k = 0; k < L.cells; ++k) gravity_potential_[L.cell(k)] = gravity_.dot(mesh_->cells()[k].center);

    fracture_dof_.assign(L.total(), 0);
    for (int s = 0; s < L.nodes; ++s) fracture_dof_[s] = mesh_->is_fracture_node(s);
    for (int j = 0; j < L.fractures; ++j) fracture_dof_[L.fracture(j)] = 1;

    double mean = 0.0;
    for (int k = 0; k < L.cells; ++k) mean += volumes_.porous[L.cell(k)];
    mean /= std::max(L.cells, 1);
    const double floor = scaling_.volume_floor_ratio * mean;
    scaling_volume_.resize(L.total());
    for (int i = 0; i < L.total(); ++i) scaling_volume_[i] = std::max(volumes_.porous[i], floor);

    std::vector<WellGeometry> geoms;
    for (const auto& w : wells_) {
        if (w.wi.size() != w.geometry.size()) throw ConfigError("well '" + w.geometry.name + "': missing well indices");
        if (w.kind == WellKind::Injection && w.q_limit > 0.0)
            throw ConfigError("well '" + w.geometry.name + "': injection rate limit must be <= 0");
        if (w.kind == WellKind::Production && w.q_limit < 0.0)
            throw ConfigError("well '" + w.geometry.name + "': production rate limit must be >= 0");
        geoms.push_back(w.geometry);
    }
    check_disjoint_wells(geoms);
}

const RelPermSet& FlowModel::relperm(int dof) const {
    return fracture_dof_[dof] ? rock_.fracture_relperm : rock_.matrix_relperm;
}

double FlowModel::porosity(int dof) const {
    const DofLayout& L = layout();
    if (L.is_cell(dof)) return rock_.cell_porosity[dof - L.nodes - L.fractures];
    if (dof >= L.nodes) return rock_.fracture_porosity[dof - L.nodes];
    const auto cells = mesh_->node_cells(dof);
    return cells.empty() ? 0.0 : rock_.cell_porosity[cells[0]];
}

ReservoirState hydrostatic_state(const FlowModel& model, double p_ref, double z_ref, double T) {
    const DofLayout& L = model.layout();
    const FluidEos& eos = model.eos();
    const double g = model.gravity_magnitude();
    const auto& G = model.gravity_potential();
    auto rhs = [&](double p) { return -eos.density(Phase::Liquid, p, T) * g; };
    ReservoirState x;
    x.dofs.resize(L.total());
    for (int i = 0; i < L.total(); ++i) {
        // height of the dof from its gravity potential g.x = -g z
        const double z = g > 0.0 ? -G[i] / g : z_ref;
        const int n = std::max(1, static_cast<int>(std::ceil(std::abs(z - z_ref) / 5.0)));
        const double h = (z - z_ref) / n;
        double p = p_ref;
        for (int k = 0; k < n; ++k) {
            const double k1 = rhs(p), k2 = rhs(p + 0.5 * h * k1), k3 = rhs(p + 0.5 * h * k2), k4 = rhs(p + h * k3);
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        DofState& s = x.dofs[i];
        s.p = p;
        s.T = T;
        s.context = classify_fresh(p, T, eos);
        if (s.context == PhaseContext::TwoPhase) s.sg = 0.0;
        complete_state(s, eos);
    }
    for (const auto& w : model.wells()) x.wells.push_back({x.dofs[w.geometry.root()].p, WellMode::Rate, false});
    return x;
}

std::array<double, 2> total_content(const FlowModel& model, const ReservoirState& state) {
    std::array<double, 2> total{0.0, 0.0};
    const auto& vol = model.volumes();
    for (int i = 0; i < model.layout().total(); ++i) {
        if (model.is_dirichlet(i)) continue;
        const auto props = evaluate_props<double>(state.dofs[i], model.eos(), model.relperm(i));
        const auto a = accumulation(props, vol.porous[i], vol.rock_heat[i]);
        total[0] += a[0];
        total[1] += a[1];
    }
    return total;
}

double reservoir_gas_volume(const FlowModel& model, const ReservoirState& state) {
    double v = 0.0;
    for (int i = 0; i < model.layout().total(); ++i) v += state.dofs[i].sg * model.volumes().porous[i];
    return v;
}

}  // namespace geovag
