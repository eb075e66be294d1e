#include <benchmark/benchmark.h>

#include <memory>

#include "geovag/io/scenario.hpp"
#include "geovag/thermo/flash.hpp"
#include "geovag/vag/transmissibility.hpp"

using namespace geovag;

namespace {

// Production-stage system of the vertical producer case at its initial state.
struct Production {
    std::unique_ptr<ScenarioRunner> runner;
    std::unique_ptr<FlowModel> model;
    std::unique_ptr<Assembler> assembler;
    ReservoirState x;
    StepContext step;

    explicit Production(int level) {
        runner = std::make_unique<ScenarioRunner>(builtin_case41(level));
        x = runner->initial_state();
        x.wells.clear();
        model = std::make_unique<FlowModel>(runner->stage_model(1, &x));
        for (const Well& w : model->wells()) x.wells.push_back({x.dofs[w.geometry.root()].p * 0.95, WellMode::Rate, true});
        assembler = std::make_unique<Assembler>(*model);
        step = prepare_step(*model, x, 600.0, opening_traces(*model, x));
    }
};

Production& production(int level) {
    static std::unique_ptr<Production> cache[5];
    if (!cache[level]) cache[level] = std::make_unique<Production>(level);
    return *cache[level];
}

void BM_Residual(benchmark::State& st) {
    Production& p = production(static_cast<int>(st.range(0)));
    ResidualSystem sys;
    for (auto _ : st) {
        p.assembler->assemble(p.x, p.step, sys, false);
        benchmark::DoNotOptimize(sys.residual.data());
    }
    st.counters["dofs"] = p.model->layout().total();
}
BENCHMARK(BM_Residual)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ResidualAndJacobian(benchmark::State& st) {
    Production& p = production(static_cast<int>(st.range(0)));
    ResidualSystem sys;
    for (auto _ : st) {
        p.assembler->assemble(p.x, p.step, sys, true);
        benchmark::DoNotOptimize(sys.reduced.data());
    }
    st.counters["dofs"] = p.model->layout().total();
}
BENCHMARK(BM_ResidualAndJacobian)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SchurAndLinearSolve(benchmark::State& st) {
    Production& p = production(static_cast<int>(st.range(0)));
    ResidualSystem sys;
    p.assembler->assemble(p.x, p.step, sys, true);
    LinearSolverConfig cfg;
    cfg.preconditioner = static_cast<Preconditioner>(st.range(1));
    int iterations = 0;
    for (auto _ : st) {
        const SchurSystem s = schur_eliminate(*p.model, p.assembler->structure(), sys);
        Eigen::VectorXd y;
        iterations = solve_linear(s.matrix, s.rhs, y, cfg).iterations;
        benchmark::DoNotOptimize(y.data());
    }
    st.counters["gmres_iterations"] = iterations;
}
BENCHMARK(BM_SchurAndLinearSolve)
    ->ArgsProduct({{1, 2}, {static_cast<int>(Preconditioner::Ilu0), static_cast<int>(Preconditioner::Cpr)}})
    ->Unit(benchmark::kMillisecond);

void BM_Transmissibilities(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto mesh = build_cartesian_mesh(n, n, n / 2, Box{Vec3(-1000, -1000, 0), Vec3(1000, 1000, 200)});
    const std::vector<Eigen::Matrix3d> perm(mesh.num_cells(), 5e-14 * Eigen::Matrix3d::Identity());
    for (auto _ : st) benchmark::DoNotOptimize(assemble_cell_transmissibilities(mesh, perm));
    st.counters["cells"] = static_cast<double>(mesh.num_cells());
}
BENCHMARK(BM_Transmissibilities)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Flash(benchmark::State& st) {
    const FluidEos eos;
    const double p = 3e6, T = eos.t_sat(p);
    const double hl = eos.enthalpy(Phase::Liquid, p, T), hg = eos.enthalpy(Phase::Gas, p, T);
    double h = hl - 2e5;
    for (auto _ : st) {
        benchmark::DoNotOptimize(flash_p_qm_qe(eos, p, 1.0, h));
        h += 1e3;
        if (h > hg + 2e5) h = hl - 2e5;
    }
}
BENCHMARK(BM_Flash);

}  // namespace
BENCHMARK_MAIN();
