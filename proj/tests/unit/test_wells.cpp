#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geovag/error.hpp"
#include "model_fixtures.hpp"

using namespace geovag;
using namespace geovag::fixtures;

namespace {

DofState liquid(const FluidEos& eos, double p, double T) {
    DofState s;
    s.p = p;
    s.T = T;
    s.context = PhaseContext::Liquid;
    complete_state(s, eos);
    return s;
}

// p(z) below the root from dp/dz = -rho(p, T) g, fine RK4.
double column_pressure(const FluidEos& eos, double p0, double depth, double T, double g) {
    const int n = 20000;
    const double h = depth / n;
    auto f = [&](double p) { return eos.density(Phase::Liquid, p, T) * g; };
    double p = p0;
    for (int i = 0; i < n; ++i) {
        const double k1 = f(p), k2 = f(p + 0.5 * h * k1), k3 = f(p + 0.5 * h * k2), k4 = f(p + h * k3);
        p += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return p;
}

Well producer_on(WellGeometry g, double q, double p_min) {
    Well w;
    w.geometry = std::move(g);
    w.kind = WellKind::Production;
    w.q_limit = q;
    w.p_limit = p_min;
    w.wi.assign(w.geometry.size(), 1e-12);
    return w;
}

}  // namespace

TEST(Peaceman, EdgeIndexOfTheCoarseVerticalProducer) {
    const double k = 5e-14, L = 40.0, dx = 200.0, r = 0.1;
    const double oracle = 2.0 * std::numbers::pi * k * L / std::log(0.14 * std::sqrt(2.0) * dx / r);
    EXPECT_NEAR(peaceman_edge_index(k, L, dx, dx, r), oracle, 1e-15 * oracle);
    EXPECT_NEAR(peaceman_edge_index(k, L, dx, dx, r), 2.1009208449541797e-12, 1e-25);
}

TEST(Peaceman, RadiusBeyondEquivalentRadiusIsRejected) {
    EXPECT_THROW(peaceman_edge_index(1e-13, 1.0, 0.5, 0.5, 0.1), ConfigError);
}

TEST(Peaceman, HalfEdgeLumpingAlongAVerticalLine) {
    const auto mesh = build_cartesian_mesh(10, 10, 5, Box{Vec3(-1000, -1000, 0), Vec3(1000, 1000, 200)});
    const std::vector<Eigen::Matrix3d> perm(mesh.num_cells(), 5e-14 * Eigen::Matrix3d::Identity());
    const auto g = build_well(mesh, vertical_line_edges(mesh, 0.0, 0.0), 0.1, "w");
    const auto wi = peaceman_index(mesh, g, perm);
    ASSERT_EQ(wi.size(), 6u);
    const double e = 2.1009208449541797e-12;
    EXPECT_NEAR(wi.front(), 0.5 * e, 1e-25);
    EXPECT_NEAR(wi.back(), 0.5 * e, 1e-25);
    for (std::size_t i = 1; i + 1 < wi.size(); ++i) EXPECT_NEAR(wi[i], e, 1e-25);
}

TEST(Coupling, ProducerDrawsOnlyWhenTheReservoirIsHigher) {
    const FluidEos eos;
    const auto mesh = build_cartesian_mesh(1, 1, 1, Box{});
    Well w = producer_on(single_node_well(mesh, 0, 0.1, "prod"), 1.0, 1e5);
    const auto props = evaluate_props<double>(liquid(eos, 2e6, 400.0), eos, RelPermSet{});
    const auto q = coupling_flux<double>(w, 0, props, 1.9e6, eos);
    const double mob = eos.density(Phase::Liquid, 2e6, 400.0) / eos.viscosity(Phase::Liquid, 2e6, 400.0);
    EXPECT_NEAR(q.mass, 1e-12 * 1e5 * mob, 1e-12 * q.mass);
    EXPECT_NEAR(q.energy, q.mass * eos.enthalpy(Phase::Liquid, 2e6, 400.0), 1e-12 * q.energy);
    const auto none = coupling_flux<double>(w, 0, props, 2.1e6, eos);
    EXPECT_EQ(none.mass, 0.0);
    EXPECT_EQ(none.energy, 0.0);
}

TEST(Coupling, InjectorPushesItsOwnFluid) {
    const FluidEos eos;
    const auto mesh = build_cartesian_mesh(1, 1, 1, Box{});
    Well w = producer_on(single_node_well(mesh, 0, 0.1, "prod"), 0.0, 5e6);
    w.kind = WellKind::Injection;
    w.q_limit = -1.0;
    w.injection_enthalpy = eos.enthalpy(Phase::Liquid, 3e6, 320.0);
    const auto reservoir = evaluate_props<double>(liquid(eos, 2e6, 450.0), eos, RelPermSet{});
    const auto q = coupling_flux<double>(w, 0, reservoir, 3e6, eos);
    const auto f = injection_fluid<double>(w, eos, 3e6);
    EXPECT_NEAR(f.T, 320.0, 1e-8);
    const double mob = eos.density(Phase::Liquid, 3e6, f.T) / eos.viscosity(Phase::Liquid, 3e6, f.T);
    EXPECT_NEAR(q.mass, 1e-12 * (2e6 - 3e6) * mob, 1e-10 * std::abs(q.mass));
    EXPECT_NEAR(q.energy, q.mass * w.injection_enthalpy, 1e-10 * std::abs(q.energy));
    EXPECT_EQ(coupling_flux<double>(w, 0, reservoir, 1e6, eos).mass, 0.0);
}

TEST(WellEquation, BranchesAndModeSelection) {
    const auto mesh = build_cartesian_mesh(1, 1, 1, Box{});
    const Well w = producer_on(single_node_well(mesh, 0, 0.1, "prod"), 10.0, 1e5);
    auto b = well_branches(w, 4.0, 2e5);
    EXPECT_DOUBLE_EQ(b.rate, 0.6);
    EXPECT_DOUBLE_EQ(b.bhp, 1.0);
    EXPECT_DOUBLE_EQ(well_residual(w, 4.0, 2e5), 0.6);
    EXPECT_EQ(select_mode(b, nullptr), WellMode::Rate);
    b = well_branches(w, 10.0, 1.5e5);
    EXPECT_DOUBLE_EQ(well_residual(w, 10.0, 1.5e5), 0.0);
    EXPECT_EQ(select_mode(b, nullptr), WellMode::Rate);
    b = well_branches(w, 2.0, 1.2e5);
    EXPECT_EQ(select_mode(b, nullptr), WellMode::Bhp);
}

TEST(WellEquation, TiesKeepTheCurrentModeOrPickPressure) {
    const WellBranches tie{0.25, 0.25};
    const WellMode rate = WellMode::Rate, bhp = WellMode::Bhp;
    EXPECT_EQ(select_mode(tie, &rate), WellMode::Rate);
    EXPECT_EQ(select_mode(tie, &bhp), WellMode::Bhp);
    EXPECT_EQ(select_mode(tie, nullptr), WellMode::Bhp);
}

TEST(WellEquation, InjectorSignConvention) {
    const auto mesh = build_cartesian_mesh(1, 1, 1, Box{});
    Well w = producer_on(single_node_well(mesh, 0, 0.1, "prod"), 0.0, 5e6);
    w.kind = WellKind::Injection;
    w.q_limit = -2.0;
    const auto b = well_branches(w, -1.0, 4e6);
    EXPECT_DOUBLE_EQ(b.rate, 0.5);
    EXPECT_DOUBLE_EQ(b.bhp, 0.2);
    EXPECT_DOUBLE_EQ(well_residual(w, -1.0, 4e6), -0.2);
    EXPECT_EQ(select_mode(b, nullptr), WellMode::Bhp);
}

TEST(PressureDrop, VerticalLiquidProducerFollowsTheDensityIntegral) {
    const FluidEos eos;
    const auto mesh = build_cartesian_mesh(1, 1, 10, Box{Vec3(0, 0, 0), Vec3(50, 50, 200)});
    const double T = 400.0, g = 9.81, p_root = 3e6;
    Well w = producer_on(build_well(mesh, vertical_line_edges(mesh, 0.0, 0.0), 0.1, "prod"), 10.0, 1e5);
    std::vector<DofState> res;
    for (std::size_t i = 0; i < w.geometry.size(); ++i)
        res.push_back(liquid(eos, column_pressure(eos, p_root + 1e5, 200.0 - w.geometry.z[i], T, g), T));
    const std::vector<double> dp0(w.geometry.size(), 0.0);
    auto t = production_pressure_drop(w, eos, RelPermSet{}, g, res, p_root, dp0);
    t = production_pressure_drop(w, eos, RelPermSet{}, g, res, p_root, t.dp);
    for (std::size_t i = 1; i < w.geometry.size(); ++i) {
        const double oracle = column_pressure(eos, p_root, 200.0 - w.geometry.z[i], T, g) - p_root;
        EXPECT_NEAR(t.dp[i], oracle, 5e-3 * oracle) << "node " << i;
        EXPECT_NEAR(t.sg[i], 0.0, 1e-12);
    }
    EXPECT_EQ(t.dp[0], 0.0);
}

TEST(PressureDrop, HorizontalWellHasNone) {
    const FluidEos eos;
    const auto mesh = build_cartesian_mesh(4, 1, 1, Box{Vec3(0, 0, 0), Vec3(40, 10, 10)});
    std::vector<std::array<int, 2>> edges;
    for (int i = 0; i < 4; ++i) edges.push_back({i, i + 1});
    Well w = producer_on(build_well(mesh, edges, 0.1, "prod"), 10.0, 1e5);
    const std::vector<DofState> res(w.geometry.size(), liquid(eos, 3e6, 420.0));
    const auto t = production_pressure_drop(w, eos, RelPermSet{}, 9.81, res, 2.5e6,
                                            std::vector<double>(w.geometry.size(), 0.0));
    for (double d : t.dp) EXPECT_EQ(d, 0.0);
    const auto s = stagnant_pressure_drop(w, eos, RelPermSet{}, 9.81, res, 2.5e6);
    for (double d : s.dp) EXPECT_EQ(d, 0.0);
}

TEST(PressureDrop, InjectorColumnUsesTheInjectedLiquid) {
    const FluidEos eos;
    const auto mesh = build_cartesian_mesh(1, 1, 4, Box{Vec3(0, 0, 0), Vec3(10, 10, 100)});
    Well w = producer_on(build_well(mesh, vertical_line_edges(mesh, 0.0, 0.0), 0.1, "prod"), 0.0, 8e6);
    w.kind = WellKind::Injection;
    w.q_limit = -5.0;
    w.injection_enthalpy = eos.enthalpy(Phase::Liquid, 5e6, 330.0);
    const auto t = injection_pressure_drop(w, eos, 9.81, 5e6);
    const double rho = eos.density(Phase::Liquid, 5e6, 330.0);
    EXPECT_NEAR(t.dp.back(), rho * 9.81 * 100.0, 2e-3 * rho * 9.81 * 100.0);
    EXPECT_NEAR(t.T.back(), 330.0, 0.5);
}

TEST(PressureDrop, ClosedInflowFallsBackToTheStagnantColumn) {
    const FluidEos eos;
    const auto mesh = build_cartesian_mesh(1, 1, 2, Box{Vec3(0, 0, 0), Vec3(10, 10, 20)});
    Well w = producer_on(build_well(mesh, vertical_line_edges(mesh, 0.0, 0.0), 0.1, "prod"), 10.0, 1e5);
    // the well is above the reservoir pressure everywhere
    const std::vector<DofState> res(w.geometry.size(), liquid(eos, 1e6, 400.0));
    const std::vector<double> dp(w.geometry.size(), 0.0);
    const auto t = production_pressure_drop(w, eos, RelPermSet{}, 9.81, res, 2e6, dp);
    for (double q : t.Q_mass) EXPECT_EQ(q, 0.0);
}

TEST(WellGas, VolumeIsSaturationTimesSectionTimesNodeLength) {
    const auto mesh = build_cartesian_mesh(1, 1, 4, Box{Vec3(0, 0, 0), Vec3(10, 10, 100)});
    Well w = producer_on(build_well(mesh, vertical_line_edges(mesh, 0.0, 0.0), 0.1, "prod"), 1.0, 1e5);
    WellTrace t;
    t.sg = {1.0, 1.0, 0.5, 0.0, 0.0};
    const double a = std::numbers::pi * 0.01;
    EXPECT_NEAR(well_gas_volume(w, t), a * (12.5 + 25.0 + 0.5 * 25.0), 1e-12);
}
