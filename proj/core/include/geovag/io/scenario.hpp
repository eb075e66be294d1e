#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geovag/io/config.hpp"
#include "geovag/io/output.hpp"

namespace geovag {

DfmMesh build_mesh(const MeshSource& src);
RockField build_rock(const DfmMesh& mesh, const RockConfig& cfg);
/// Wells of the scenario in configuration order.
std::vector<Well> build_wells(const DfmMesh& mesh, const RockField& rock, const std::vector<WellConfig>& cfg);
/// Dirichlet data of a stage; frozen sets copy their values from `current`.
DirichletData build_dirichlet(const DfmMesh& mesh, const FluidEos& eos, const std::vector<DirichletConfig>& cfg,
                              const ReservoirState* current);

/// Largest relative change of p, T and s^g between two states, per year of `dt`.
double stationarity_rate(const ReservoirState& a, const ReservoirState& b, double dt);
/// Scaled residual of a one-year step that keeps `x` unchanged: the relative
/// content change per year that the fluxes at `x` would cause.
double stationarity_residual(const Assembler& assembler, const ReservoirState& x,
                             const std::vector<WellTrace>& traces);

struct RunOptions {
    int last_stage = 0;  // 1-based; 0 runs every stage
    std::filesystem::path output;  // overrides the configured directory when non-empty
    std::optional<std::filesystem::path> checkpoint_from;
    bool write_files = true;
    std::ostream* log = nullptr;
    /// Every accepted step, after the step's outputs were written.
    std::function<void(int stage, const StepRecord&, const Simulator&)> on_step;
    /// Stage start (after the stage model and opening traces are set up).
    std::function<void(int stage, const Simulator&)> on_stage_start;
};

struct StageSummary {
    std::string name;
    int steps = 0;
    int newton = 0;
    int linear = 0;
    double time = 0.0;
    bool stationary = false;
};

/// Drives the stages of a scenario. The mesh and the stage models live as
/// long as the runner.
class ScenarioRunner {
public:
    explicit ScenarioRunner(ScenarioConfig cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const DfmMesh& mesh() const { return mesh_; }
    const RockField& rock() const { return rock_; }
    const std::vector<Well>& wells() const { return wells_; }
    /// Model of a stage (0-based) for a given state at the stage start.
    FlowModel stage_model(int stage, const ReservoirState* current) const;
    ReservoirState initial_state() const;

    /// Dof counts and stage summary without solving.
    void describe(std::ostream& os) const;

    std::vector<StageSummary> run(const RunOptions& opt);
    /// State and model after `run` returned.
    const ReservoirState& final_state() const { return state_; }
    const FlowModel& final_model() const { return *model_; }

private:
    ScenarioConfig cfg_;
    DfmMesh mesh_;
    RockField rock_;
    FluidEos eos_;
    std::vector<Well> wells_;
    ReservoirState state_;
    std::unique_ptr<FlowModel> model_;
};

/// Mesh statistics for the mesh-info command.
void describe_mesh(const DfmMesh& mesh, std::ostream& os);

}  // namespace geovag
