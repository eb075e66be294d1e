#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geovag/assembly/model.hpp"
#include "geovag/mesh/mesh.hpp"
#include "geovag/solver/newton.hpp"

namespace geovag {

struct MeshSource {
    std::array<int, 3> cells{1, 1, 1};  // Cartesian builder
    Box box;
    std::filesystem::path file;  // .dfm file, used when non-empty
};

struct RockProps {
    std::optional<Eigen::Matrix3d> permeability;  // m2
    std::optional<double> porosity;
    std::optional<double> conductivity;   // W/(m K)
    std::optional<double> heat_capacity;  // J/(m3 K)
};

struct RockRegion {
    Box box;  // cells whose center lies inside
    RockProps props;
};

struct RockConfig {
    RockProps matrix;
    RockProps fracture;  // permeability is the tangential value (0,0)
    std::vector<RockRegion> regions;
    double matrix_relperm_exponent[2] = {2.0, 2.0};
    double fracture_relperm_exponent[2] = {2.0, 2.0};
};

struct InitialConfig {
    double pressure = 1e5;  // Pa at reference_z
    double reference_z = 0.0;
    std::optional<double> temperature;          // K
    std::optional<double> saturation_offset;    // K, T = t_sat(pressure) + offset
};

struct WellConfig {
    std::string name;
    WellKind kind = WellKind::Production;
    double radius = 0.1;
    std::optional<std::array<double, 2>> vertical_line;  // (x, y), m
    std::vector<std::array<int, 2>> edges;
    std::string mesh_well;  // well declared in the .dfm file
    double p_limit = 1e5;
    double q_limit = 0.0;
    double injection_enthalpy = 0.0;
    std::vector<double> well_index;  // explicit WI per node, optional
    HydrostaticOptions hydrostatics;
};

struct DirichletConfig {
    std::vector<std::string> tags;
    std::vector<int> nodes;
    bool freeze = false;  // values from the state at the start of the stage
    double pressure = 0.0;
    double temperature = 0.0;
};

struct StageConfig {
    std::string name;
    double duration = 0.0;  // s
    bool until_stationary = false;
    double stationarity_tolerance = 1e-6;  // max relative change per year
    std::vector<DirichletConfig> dirichlet;
    std::vector<std::string> open_wells;
    TimeStepConfig time;
};

struct OutputConfig {
    std::filesystem::path directory = "output";
    int vtk_every_steps = 0;  // 0: stage ends only
    bool node_fields = false;
    int checkpoint_every_steps = 0;
    int profile_every_steps = 0;  // 0: stage ends only
};

struct ScenarioConfig {
    std::string name = "scenario";
    MeshSource mesh;
    RockConfig rock;
    EosParams eos;
    FluidConductivity fluid_conductivity;
    Vec3 gravity{0.0, 0.0, -9.81};
    VolumeFractions fractions;
    ResidualScaling scaling;
    InitialConfig initial;
    std::vector<WellConfig> wells;
    std::vector<StageConfig> stages;
    SolverConfig solver;
    OutputConfig output;
};

/// Reads a JSON scenario. Errors name the offending key path.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
std::string format_config(const ScenarioConfig& cfg);

/// The two-stage vertical-producer convergence scenario on refinement level 1..4.
ScenarioConfig builtin_case41(int level);

}  // namespace geovag
