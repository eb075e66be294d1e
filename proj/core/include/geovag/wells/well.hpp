#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string_view>
#include <vector>

#include "geovag/mesh/well_geometry.hpp"
#include "geovag/thermo/props.hpp"

namespace geovag {

enum class WellKind : std::uint8_t { Injection, Production };
enum class WellMode : std::uint8_t { Rate, Bhp };

std::string_view to_string(WellKind k);
std::string_view to_string(WellMode m);

struct HydrostaticOptions {
    int corrections = 1;     // midpoint re-evaluations after the upstream predictor
    bool iterate = false;    // iterate the midpoint evaluation to `tolerance` instead
    double tolerance = 1e-8; // relative, on the child pressure
};

struct Well {
    WellGeometry geometry;
    WellKind kind = WellKind::Production;
    double p_limit = 1e5;             // Pa: max BHP (injection) or min BHP (production)
    double q_limit = 0.0;             // kg/s: <= 0 for injection, >= 0 for production
    double injection_enthalpy = 0.0;  // J/kg
    std::vector<double> wi;           // m3, per local node
    HydrostaticOptions hydrostatics;

    double beta_inj() const { return kind == WellKind::Injection ? 1.0 : 0.0; }
    double beta_prod() const { return kind == WellKind::Production ? 1.0 : 0.0; }
    double rate_scale() const;
    double pressure_scale() const;
};

/// Explicit along-well data for one time step.
struct WellTrace {
    std::vector<double> dp;  // p^w_s - p_root, zero at the root
    std::vector<double> p;   // node pressures of the evaluation
    std::vector<double> T;
    std::vector<double> sl;
    std::vector<double> sg;
    std::vector<double> Q_mass;    // subtree sums of the coupling mass rates (production)
    std::vector<double> Q_energy;
    double p_root = 0.0;
};

double peaceman_edge_index(double k, double length, double dx, double dy, double radius);

/// Node well indices by half-edge lumping of Peaceman edge indices; host cell
/// sizes and horizontal permeability are averaged over the cells containing the edge.
std::vector<double> peaceman_index(const DfmMesh& mesh, const WellGeometry& well,
                                   const std::vector<Eigen::Matrix3d>& perm);

template <class S>
struct CouplingFlux {
    S mass{0.0};
    S energy{0.0};
};

/// Well-side liquid state at pressure p for an injection well, with T from
/// the prescribed enthalpy (derivative through the implicit relation).
template <class S>
DofProps<S> injection_fluid(const Well& well, const FluidEos& eos, const S& p);

/// Reservoir to well mass and energy rates at one well node.
template <class S>
CouplingFlux<S> coupling_flux(const Well& well, int local, const DofProps<S>& reservoir, const S& p_well_node,
                              const FluidEos& eos) {
    const S V = well.wi[local] * (reservoir.p - p_well_node);
    CouplingFlux<S> q;
    if (well.kind == WellKind::Production) {
        if (value(V) < 0.0) return q;
        for (const auto& ph : reservoir.phase) {
            const S qa = ph.mobility * V;
            q.mass += qa;
            q.energy += ph.enthalpy * qa;
        }
    } else {
        if (value(V) > 0.0) return q;
        const DofProps<S> w = injection_fluid(well, eos, p_well_node);
        for (const auto& ph : w.phase) {
            const S qa = ph.density / ph.viscosity * ph.rel_perm * V;
            q.mass += qa;
            q.energy += ph.enthalpy * qa;
        }
    }
    return q;
}

/// Pressure drops of an injection well from the previous root pressure.
WellTrace injection_pressure_drop(const Well& well, const FluidEos& eos, double gravity, double p_root_prev);

/// Pressure drops of a production well from the previous step: subtree sums
/// of the coupling rates, flash at the previous node pressures, then the
/// hydrostatic march with the mixture density of each edge's lower node.
/// `reservoir` holds the previous reservoir state of each local node.
WellTrace production_pressure_drop(const Well& well, const FluidEos& eos, const RelPermSet& rock, double gravity,
                                   const std::vector<DofState>& reservoir, double p_root_prev,
                                   const std::vector<double>& dp_prev);

/// Trace of a well that has just been opened: production wells take the
/// hydrostatic profile of the reservoir mixture density at each node, injection
/// wells the injected liquid column.
WellTrace stagnant_pressure_drop(const Well& well, const FluidEos& eos, const RelPermSet& rock, double gravity,
                                 const std::vector<DofState>& reservoir, double p_root);

/// Scaled arguments of the well min equation: rate branch and pressure branch.
struct WellBranches {
    double rate = 0.0;
    double bhp = 0.0;
};
WellBranches well_branches(const Well& well, double total_rate, double p_bhp);
/// min of the branches with the sign convention of the well kind.
double well_residual(const Well& well, double total_rate, double p_bhp);

/// Active-set selection: the smaller branch wins; ties keep `current`, or
/// select the pressure branch when there is no current mode.
WellMode select_mode(const WellBranches& b, const WellMode* current);

/// Gas volume inside the well from the trace saturations.
double well_gas_volume(const Well& well, const WellTrace& trace);

}  // namespace geovag
