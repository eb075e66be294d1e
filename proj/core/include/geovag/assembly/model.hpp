#pragma once

#include <Eigen/Core>

#include <vector>

#include "geovag/mesh/mesh.hpp"
#include "geovag/thermo/eos.hpp"
#include "geovag/thermo/props.hpp"
#include "geovag/thermo/relperm.hpp"
#include "geovag/thermo/state.hpp"
#include "geovag/vag/transmissibility.hpp"
#include "geovag/wells/well.hpp"

namespace geovag {

/// Cellwise matrix and facewise fracture rock properties.
struct RockField {
    std::vector<Eigen::Matrix3d> cell_perm;    // m2
    std::vector<double> cell_porosity;
    std::vector<double> cell_conductivity;     // W/(m K)
    std::vector<double> cell_heat_capacity;    // J/(m3 K)
    std::vector<double> fracture_perm;         // m2, tangential
    std::vector<double> fracture_porosity;
    std::vector<double> fracture_conductivity;
    std::vector<double> fracture_heat_capacity;
    RelPermSet matrix_relperm;
    RelPermSet fracture_relperm;

    static RockField uniform(const DfmMesh& mesh, double perm, double porosity, double conductivity,
                             double heat_capacity);
    void validate(const DfmMesh& mesh) const;
};

struct FluidConductivity {
    double liquid = 0.6;  // W/(m K)
    double gas = 0.03;
};

/// Effective conductivity of a control volume: porosity-weighted mean of the
/// rock value and the saturation-weighted fluid value.
double effective_conductivity(double porosity, double rock, const FluidConductivity& fluid, double sl, double sg);

/// Reference quantities for the row scaling of the conservation equations.
struct ResidualScaling {
    double density = 1000.0;          // kg/m3
    double internal_energy = 1.0e6;   // J/kg
    double temperature = 500.0;       // K
    double volume_floor_ratio = 1e-3; // fraction of the mean cell porous volume
};

struct WellState {
    double p = 0.0;  // bottom-hole (root) pressure, Pa
    WellMode mode = WellMode::Rate;
    bool mode_set = false;
};

struct ReservoirState {
    std::vector<DofState> dofs;
    std::vector<WellState> wells;
};

/// Dirichlet node values; `mask[s]` flags node s.
struct DirichletData {
    std::vector<char> mask;
    std::vector<DofState> values;
};

/// Discrete model of one stage: mesh, stencils, volumes, fluid and wells.
class FlowModel {
public:
    FlowModel(const DfmMesh& mesh, RockField rock, FluidEos eos, Vec3 gravity, VolumeFractions fractions,
              FluidConductivity fluid_conductivity, DirichletData dirichlet, std::vector<Well> wells,
              ResidualScaling scaling = {});

    const DfmMesh& mesh() const { return *mesh_; }
    const DofLayout& layout() const { return trans_.layout; }
    const TransmissibilitySet& trans() const { return trans_; }
    const ControlVolumes& volumes() const { return volumes_; }
    const FluidEos& eos() const { return eos_; }
    const RockField& rock() const { return rock_; }
    const Vec3& gravity() const { return gravity_; }
    double gravity_magnitude() const { return -gravity_.z(); }
    const FluidConductivity& fluid_conductivity() const { return fluid_conductivity_; }
    const DirichletData& dirichlet() const { return dirichlet_; }
    const std::vector<Well>& wells() const { return wells_; }
    const ResidualScaling& scaling() const { return scaling_; }
    const VolumeFractions& fractions() const { return fractions_; }

    bool is_dirichlet(int dof) const { return dof < layout().nodes && dirichlet_.mask[dof]; }
    /// g . x of every dof.
    const std::vector<double>& gravity_potential() const { return gravity_potential_; }
    const RelPermSet& relperm(int dof) const;
    /// Porosity of the rock attached to a dof (used for effective conductivities).
    double porosity(int dof) const;
    /// Porous volume used for row scaling, floored away from zero.
    double scaling_volume(int dof) const { return scaling_volume_[dof]; }

    /// Copy of this model with another Dirichlet set and wells (volumes recomputed).
    FlowModel with_stage(DirichletData dirichlet, std::vector<Well> wells) const;

private:
    void finish();

    const DfmMesh* mesh_;
    RockField rock_;
    FluidEos eos_;
    Vec3 gravity_;
    VolumeFractions fractions_;
    FluidConductivity fluid_conductivity_;
    DirichletData dirichlet_;
    std::vector<Well> wells_;
    ResidualScaling scaling_;
    TransmissibilitySet trans_;
    ControlVolumes volumes_;
    std::vector<double> gravity_potential_;
    std::vector<double> scaling_volume_;
    std::vector<char> fracture_dof_;
};

/// Mass (kg) and energy (J) stored in a control volume.
template <class S>
std::array<S, 2> accumulation(const DofProps<S>& x, double porous, double rock_heat) {
    S mass{0.0}, energy{0.0};
    for (const auto& ph : x.phase) {
        const S m = ph.density * ph.saturation;
        mass += m * ph.fraction;
        energy += m * ph.internal_energy;
    }
    return {porous * mass, porous * energy + rock_heat * x.T};
}

/// Liquid state at temperature T whose pressure solves dp/dz = -rho(p, T) g
/// from p_ref at height z_ref, evaluated at every dof. Wells start at the
/// pressure of their root node.
ReservoirState hydrostatic_state(const FlowModel& model, double p_ref, double z_ref, double T);

/// Total water mass and energy of a state over all dofs, Dirichlet nodes excluded.
std::array<double, 2> total_content(const FlowModel& model, const ReservoirState& state);

/// Gas volume in the reservoir: sum of s^g times porous volume.
double reservoir_gas_volume(const FlowModel& model, const ReservoirState& state);

}  // namespace geovag
