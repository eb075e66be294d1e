#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geovag/assembly/system.hpp"
#include "geovag/solver/linear.hpp"

namespace geovag {

struct NewtonConfig {
    double tolerance = 1e-8;  // scaled l-infinity residual
    int max_iterations = 25;
    double max_pressure_change = 0.5;  // relative to the current pressure
    double max_saturation_change = 0.5;
    double max_temperature_change = 20.0;  // K
    int max_active_set_changes = 15;       // iterations with a context or mode switch
    LinearSolverConfig linear;
};

struct TimeStepConfig {
    double initial = 86400.0;  // s
    double max = 86400.0;
    double min = 1e-3;
    double growth = 1.2;
    double cut = 0.5;
};

struct SolverConfig {
    NewtonConfig newton;
    TimeStepConfig time;

    void validate() const;
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    int linear_iterations = 0;
    double residual = 0.0;
    int active_set_changes = 0;
    std::string failure;
};

/// Applies a damped Newton update dx (full-system order) to x, then updates
/// the phase contexts. Returns the number of dofs whose context changed.
int apply_update(const FlowModel& model, const NewtonConfig& cfg, const Eigen::VectorXd& dx, ReservoirState& x);

/// Well modes from the branch comparison at state x. Returns the number of switches.
int select_well_modes(const FlowModel& model, const std::vector<WellTrace>& traces, ReservoirState& x);

/// Newton-min iterations for one time step; x is the initial guess and the result.
NewtonReport newton_solve(const Assembler& assembler, const StepContext& step, ReservoirState& x,
                          const NewtonConfig& cfg);

/// Well traces for the next step from the accepted state and the previous traces.
std::vector<WellTrace> next_traces(const FlowModel& model, const ReservoirState& x, const std::vector<WellTrace>& prev);
/// Traces of freshly opened wells (hydrostatic, no flow).
std::vector<WellTrace> opening_traces(const FlowModel& model, const ReservoirState& x);

struct StepRecord {
    int step = 0;
    double time = 0.0;  // s, end of the step
    double dt = 0.0;
    int newton = 0;
    int linear = 0;
    int failures = 0;  // rejected attempts before acceptance
    double residual = 0.0;
    double complementarity = 0.0;  // max |min(s, 1 - c)| over dofs and phases
    std::vector<double> well_rate;
    std::vector<double> well_bhp;
    std::vector<WellMode> well_mode;
    std::vector<double> well_complementarity;  // |rate branch * pressure branch|
};

/// Fully implicit Euler time stepping with step cutting on failure.
class Simulator {
public:
    Simulator(const FlowModel& model, ReservoirState initial, SolverConfig cfg, std::vector<WellTrace> traces = {});

    const FlowModel& model() const { return *model_; }
    const ReservoirState& state() const { return state_; }
    const std::vector<WellTrace>& traces() const { return traces_; }
    double time() const { return time_; }
    double dt() const { return dt_; }
    int steps() const { return steps_; }
    const SolverConfig& config() const { return cfg_; }
    SolverConfig& config() { return cfg_; }

    void restore(double time, double dt, int steps, ReservoirState state, std::vector<WellTrace> traces);

    /// One accepted step ending at or before t_end. Throws SolverError when
    /// the step falls below the floor.
    StepRecord advance(double t_end);
    /// Steps until t_end; `on_step` sees every accepted step.
    void run(double t_end, const std::function<void(const StepRecord&)>& on_step = {});

private:
    const FlowModel* model_;
    Assembler assembler_;
    SolverConfig cfg_;
    ReservoirState state_;
    std::vector<WellTrace> traces_;
    double time_ = 0.0;
    double dt_;
    int steps_ = 0;
};

double complementarity_error(const FlowModel& model, const ReservoirState& x);

}  // namespace geovag
