#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "geovag/mesh/mesh.hpp"

namespace geovag {

/// Global numbering of the reservoir degrees of freedom: nodes first, then
/// fracture faces, then cells.
struct DofLayout {
    int nodes = 0;
    int fractures = 0;
    int cells = 0;

    static DofLayout of(const DfmMesh& mesh) {
        return {static_cast<int>(mesh.num_nodes()), static_cast<int>(mesh.num_fracture_faces()),
                static_cast<int>(mesh.num_cells())};
    }
    int node(int s) const { return s; }
    int fracture(int j) const { return nodes + j; }
    int cell(int k) const { return nodes + fractures + k; }
    int total() const { return nodes + fractures + cells; }
    bool is_cell(int dof) const { return dof >= nodes + fractures; }
};

/// Local flux stencils of a family of entities (cells or fracture faces).
/// For entity e with owner dof x_e and neighbours nu_0..nu_{n-1}:
///   F_{e,nu_i}(u) = sum_j T_e[i][j] (u_{x_e} - u_{nu_j}).
class StencilSet {
public:
    int size() const { return static_cast<int>(owner_.size()); }
    int owner(int e) const { return owner_[e]; }
    std::span<const int> dofs(int e) const {
        return {dofs_.data() + offsets_[e], static_cast<std::size_t>(offsets_[e + 1] - offsets_[e])};
    }
    int stencil_size(int e) const { return offsets_[e + 1] - offsets_[e]; }
    /// First flux index of entity e in a flat flux vector.
    int flux_offset(int e) const { return offsets_[e]; }
    int num_fluxes() const { return offsets_.empty() ? 0 : offsets_.back(); }
    /// Row-major n x n matrix of entity e.
    const double* matrix(int e) const { return values_.data() + matrix_offsets_[e]; }
    double* matrix(int e) { return values_.data() + matrix_offsets_[e]; }

    void add(int owner, std::span<const int> dofs, std::span<const double> matrix);
    void reserve(std::size_t entities, std::size_t dofs, std::size_t values);

private:
    std::vector<int> owner_;
    std::vector<int> offsets_{0};
    std::vector<int> dofs_;
    std::vector<std::size_t> matrix_offsets_;
    std::vector<double> values_;
};

/// Cell stencils T_K for cellwise constant tensors (one per cell).
StencilSet assemble_cell_transmissibilities(const DfmMesh& mesh, const std::vector<Eigen::Matrix3d>& perm);
/// Fracture-face stencils T_sigma for isotropic tangential permeabilities, scaled by the face width.
StencilSet assemble_fracture_transmissibilities(const DfmMesh& mesh, const std::vector<double>& perm_f,
                                                const std::vector<double>& width);

/// Darcy stencils and their unit-tensor counterparts used for Fourier fluxes.
struct TransmissibilitySet {
    DofLayout layout;
    StencilSet cell_darcy;
    StencilSet cell_geometric;
    StencilSet fracture_darcy;
    StencilSet fracture_geometric;
};

TransmissibilitySet assemble_transmissibilities(const DfmMesh& mesh, const std::vector<Eigen::Matrix3d>& perm,
                                                const std::vector<double>& fracture_perm);

/// Fluxes of a scalar dof field for every stencil entry.
std::vector<double> evaluate_fluxes(const StencilSet& stencils, std::span<const double> u);

/// Porous volume phi_nu and rock complementary volume of every dof.
struct ControlVolumes {
    std::vector<double> porous;
    std::vector<double> rock;
    std::vector<double> rock_heat;  // J/K, rock volume times volumetric heat capacity
};

struct VolumeFractions {
    double omega = 0.05;    // matrix cell share per eligible node
    double omega_f = 0.05;  // fracture face share per eligible node
};

/// Distributes cell and fracture volumes to their dofs. Nodes flagged in
/// `dirichlet` receive nothing; fracture nodes receive only from fracture faces.
ControlVolumes distribute_volumes(const DfmMesh& mesh, const std::vector<double>& cell_porosity,
                                  const std::vector<double>& fracture_porosity, const VolumeFractions& fractions,
                                  const std::vector<char>& dirichlet,
                                  const std::vector<double>& cell_heat_capacity = {},
                                  const std::vector<double>& fracture_heat_capacity = {});

}  // namespace geovag
