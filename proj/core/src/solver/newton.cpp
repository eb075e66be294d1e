#include "geovag/solver/newton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

void SolverConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("solver: " + what); };
    if (!(newton.tolerance > 0.0)) fail("newton tolerance must be positive");
    if (!(newton.linear.tolerance > 0.0)) fail("linear tolerance must be positive");
    if (newton.max_iterations < 1) fail("max Newton iterations must be >= 1");
    if (newton.linear.restart < 1 || newton.linear.max_iterations < 1) fail("GMRES restart and iterations must be >= 1");
    if (!(time.growth > 1.0)) fail("growth factor must exceed 1");
    if (!(time.cut > 0.0 && time.cut < 1.0)) fail("cut factor must lie in (0, 1)");
    if (!(time.initial > 0.0 && time.max >= time.min && time.min > 0.0)) fail("time steps must satisfy 0 < min <= max");
    if (!(newton.max_pressure_change > 0.0 && newton.max_saturation_change > 0.0 &&
          newton.max_temperature_change > 0.0))
        fail("damping limits must be positive");
}

int apply_update(const FlowModel& model, const NewtonConfig& cfg, const Eigen::VectorXd& dx, ReservoirState& x) {
    const FluidEos& eos = model.eos();
    const auto& prm = eos.params();
    int changes = 0;
    for (int i = 0; i < model.layout().total(); ++i) {
        if (model.is_dirichlet(i)) continue;
        double dp = dx(2 * i), d2 = dx(2 * i + 1);
        if (!std::isfinite(dp) || !std::isfinite(d2))
            throw SolverError("non-finite Newton update at " + describe_dof(model, i));
        DofState& s = x.dofs[i];
        const double lim = cfg.max_pressure_change * std::abs(s.p);
        s.p += std::clamp(dp, -lim, lim);
        if (s.context == PhaseContext::TwoPhase) {
            s.sg += std::clamp(d2, -cfg.max_saturation_change, cfg.max_saturation_change);
        } else {
            s.T = std::clamp(s.T + std::clamp(d2, -cfg.max_temperature_change, cfg.max_temperature_change), prm.t_min,
                             prm.t_max);
        }
        if (s.context == PhaseContext::TwoPhase) s.p = std::clamp(s.p, eos.p_sat_min(), eos.p_sat_max());
        if (update_context(s, eos)) ++changes;
        if (s.context == PhaseContext::TwoPhase) s.p = std::clamp(s.p, eos.p_sat_min(), eos.p_sat_max());
        complete_state(s, eos);
    }
    const int nres = model.layout().total();
    for (std::size_t w = 0; w < x.wells.size(); ++w) {
        double dp = dx(2 * (nres + static_cast<int>(w)));
        if (!std::isfinite(dp)) throw SolverError("non-finite Newton update at " + describe_dof(model, nres + static_cast<int>(w)));
        const double lim = cfg.max_pressure_change * std::abs(x.wells[w].p);
        x.wells[w].p += std::clamp(dp, -lim, lim);
    }
    return changes;
}

int select_well_modes(const FlowModel& model, const std::vector<WellTrace>& traces, ReservoirState& x) {
    int switches = 0;
    for (std::size_t w = 0; w < x.wells.size(); ++w) {
        auto& ws = x.wells[w];
        const auto e = evaluate_well(model, x, traces[w], static_cast<int>(w));
        const WellMode m = select_mode(e.branches, ws.mode_set ? &ws.mode : nullptr);
        if (ws.mode_set && m != ws.mode) ++switches;
        ws.mode = m;
        ws.mode_set = true;
    }
    return switches;
}

NewtonReport newton_solve(const Assembler& assembler, const StepContext& step, ReservoirState& x,
                          const NewtonConfig& cfg) {
    const FlowModel& model = assembler.model();
    const SystemStructure& S = assembler.structure();
    NewtonReport rep;
    ResidualSystem sys;
    try {
        select_well_modes(model, step.traces, x);
        for (int it = 0;; ++it) {
            assembler.assemble(x, step, sys, true);
            rep.residual = residual_norm(sys.residual);
            rep.iterations = it;
            if (rep.residual <= cfg.tolerance) {
                rep.converged = true;
                return rep;
            }
            if (it == cfg.max_iterations) {
                std::ostringstream os;
                os << "no convergence in " << it << " Newton iterations (residual " << rep.residual << ")";
                rep.failure = os.str();
                return rep;
            }
            const SchurSystem schur = schur_eliminate(model, S, sys);
            Eigen::VectorXd y;
            const GmresResult g = solve_linear(schur.matrix, schur.rhs, y, cfg.linear);
            rep.linear_iterations += g.iterations;
            if (!g.converged) {
                std::ostringstream os;
                os << "GMRES stagnated at relative residual " << g.relative_residual << " after " << g.iterations
                   << " iterations";
                rep.failure = os.str();
                return rep;
            }
            const Eigen::VectorXd dx = back_substitute(S, sys, schur, y);
            const int changes = apply_update(model, cfg, dx, x) + select_well_modes(model, step.traces, x);
            if (changes > 0 && ++rep.active_set_changes > cfg.max_active_set_changes) {
                rep.failure = "active-set cycling";
                return rep;
            }
        }
    } catch (const Error& e) {
        rep.failure = e.what();
    }
    return rep;
}

namespace {
std::vector<DofState> well_node_states(const Well& well, const ReservoirState& x) {
    std::vector<DofState> r;
    r.reserve(well.geometry.size());
    for (int s : well.geometry.nodes) r.push_back(x.dofs[s]);
    return r;
}
}  // namespace

std::vector<WellTrace> next_traces(const FlowModel& model, const ReservoirState& x, const std::vector<WellTrace>& prev) {
    std::vector<WellTrace> out;
    for (std::size_t w = 0; w < model.wells().size(); ++w) {
        const Well& well = model.wells()[w];
        if (well.kind == WellKind::Injection)
            out.push_back(injection_pressure_drop(well, model.eos(), model.gravity_magnitude(), x.wells[w].p));
        else
            out.push_back(production_pressure_drop(well, model.eos(), model.relperm(well.geometry.root()),
                                                   model.gravity_magnitude(), well_node_states(well, x), x.wells[w].p,
                                                   prev[w].dp));
    }
    return out;
}

std::vector<WellTrace> opening_traces(const FlowModel& model, const ReservoirState& x) {
    if (x.wells.size() != model.wells().size()) throw SolverError("opening traces: well state count does not match the model");
    std::vector<WellTrace> out;
    for (std::size_t w = 0; w < model.wells().size(); ++w) {
        const Well& well = model.wells()[w];
        out.push_back(stagnant_pressure_drop(well, model.eos(), model.relperm(well.geometry.root()),
                                             model.gravity_magnitude(), well_node_states(well, x), x.wells[w].p));
    }
    return out;
}

double complementarity_error(const FlowModel& model, const ReservoirState& x) {
    double m = 0.0;
    for (int i = 0; i < model.layout().total(); ++i) {
        const auto r = closure_residuals(x.dofs[i], model.eos());
        m = std::max({m, std::abs(r.r2), std::abs(r.r3)});
    }
    return m;
}

Simulator::Simulator(const FlowModel& model, ReservoirState initial, SolverConfig cfg, std::vector<WellTrace> traces)
    : model_(&model), assembler_(model), cfg_(cfg), state_(std::move(initial)), traces_(std::move(traces)),
      dt_(cfg.time.initial) {
    cfg_.validate();
    if (static_cast<int>(state_.dofs.size()) != model.layout().total())
        throw ConfigError("initial state size does not match the model");
    if (state_.wells.size() != model.wells().size()) throw ConfigError("initial state needs one entry per well");
    if (traces_.empty() && !model.wells().empty()) traces_ = opening_traces(model, state_);
}

void Simulator::restore(double time, double dt, int steps, ReservoirState state, std::vector<WellTrace> traces) {
    time_ = time;
    dt_ = dt;
    steps_ = steps;
    state_ = std::move(state);
    traces_ = std::move(traces);
}

StepRecord Simulator::advance(double t_end) {
    const double remaining = t_end - time_;
    if (!(remaining > 0.0)) throw SolverError("advance past the end time");
    double dt = std::min(dt_, remaining);
    // avoid a sliver step at the end of the interval
    if (remaining - dt < 1e-3 * dt) dt = remaining;
    const bool truncated = dt < dt_;
    int failures = 0;
    std::string last_failure;
    while (true) {
        ReservoirState trial = state_;
        NewtonReport rep;
        StepContext ctx;
        try {
            ctx = prepare_step(*model_, state_, dt, traces_);
            rep = newton_solve(assembler_, ctx, trial, cfg_.newton);
        } catch (const Error& e) {
            rep.failure = e.what();
        }
        if (rep.converged) {
            StepRecord r;
            r.step = ++steps_;
            r.dt = dt;
            r.time = dt == remaining ? t_end : time_ + dt;
            r.newton = rep.iterations;
            r.linear = rep.linear_iterations;
            r.failures = failures;
            r.residual = rep.residual;
            r.complementarity = complementarity_error(*model_, trial);
            for (std::size_t w = 0; w < trial.wells.size(); ++w) {
                const auto e = evaluate_well(*model_, trial, ctx.traces[w], static_cast<int>(w));
                r.well_rate.push_back(e.total_rate);
                r.well_bhp.push_back(trial.wells[w].p);
                r.well_mode.push_back(trial.wells[w].mode);
                r.well_complementarity.push_back(std::abs(e.branches.rate * e.branches.bhp));
            }
            state_ = std::move(trial);
            time_ = r.time;
            traces_ = next_traces(*model_, state_, traces_);
            if (!(truncated && failures == 0)) dt_ = std::min(cfg_.time.growth * dt, cfg_.time.max);
            return r;
        }
        ++failures;
        last_failure = rep.failure;
        dt *= cfg_.time.cut;
        dt_ = dt;
        if (dt < cfg_.time.min) {
            std::ostringstream os;
            os << "time step " << dt << " s below the floor " << cfg_.time.min << " s at t = " << time_
               << " s; last failure: " << last_failure;
            throw SolverError(os.str());
        }
    }
}

void Simulator::run(double t_end, const std::function<void(const StepRecord&)>& on_step) {
    while (time_ < t_end) {
        const StepRecord r = advance(t_end);
        if (on_step) on_step(r);
    }
}

}  // namespace geovag
