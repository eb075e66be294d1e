#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "geovag/error.hpp"
#include "geovag/io/scenario.hpp"
#include "jacobian_check.hpp"
#include "model_fixtures.hpp"

using namespace geovag;
using namespace geovag::fixtures;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("geovag_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const char* kMinimal = R"({
  "name": "tiny",
  "mesh": {"cartesian": {"cells": [2, 2, 2], "min_m": [0, 0, 0], "max_m": [100, 100, 50]}},
  "rock": {"matrix": {"permeability_m2": 1e-13, "porosity": 0.2,
                      "conductivity_W_per_m_K": 2.0, "heat_capacity_J_per_m3_K": 2e6}},
  "initial": {"type": "hydrostatic", "pressure_Pa": 2e6, "reference_z_m": 50, "temperature_K": 350},
  "stages": [{"name": "s", "duration_s": 1000}]
})";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string with(const std::string& base, const std::function<void(nlohmann::json&)>& edit) {
    auto j = nlohmann::json::parse(base);
    edit(j);
    return j.dump();
}

// Lines of a CSV file split on commas.
std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

// Structural summary of a legacy ASCII VTK unstructured grid.
struct VtkSummary {
    int points = 0, cells = 0, cell_list_size = 0, cell_types = 0;
    std::map<std::string, std::vector<double>> cell_data, point_data;
};

VtkSummary read_vtk(const fs::path& p) {
    std::ifstream in(p);
    VtkSummary v;
    std::string tok, section;
    int section_n = 0;
    while (in >> tok) {
        if (tok == "POINTS") {
            in >> v.points >> tok;
            for (int i = 0; i < 3 * v.points; ++i) in >> tok;
        } else if (tok == "CELLS" || tok == "POLYGONS") {
            in >> v.cells >> v.cell_list_size;
            for (int i = 0; i < v.cell_list_size; ++i) in >> tok;
        } else if (tok == "CELL_TYPES") {
            in >> v.cell_types;
            for (int i = 0; i < v.cell_types; ++i) in >> tok;
        } else if (tok == "CELL_DATA" || tok == "POINT_DATA") {
            section = tok;
            in >> section_n;
        } else if (tok == "SCALARS") {
            std::string name, type, lookup, table;
            int components = 0;
            in >> name >> type >> components >> lookup >> table;
            auto& data = section == "CELL_DATA" ? v.cell_data[name] : v.point_data[name];
            for (int i = 0; i < section_n; ++i) {
                double d;
                in >> d;
                data.push_back(d);
            }
        }
    }
    return v;
}

ScenarioConfig small_case() {
    ScenarioConfig c = builtin_case41(1);
    c.name = "small";
    c.mesh.cells = {4, 4, 3};
    c.stages[1].duration = 2.0 * 86400.0;
    c.output.checkpoint_every_steps = 4;
    c.output.profile_every_steps = 10;
    return c;
}

double max_state_difference(const ReservoirState& a, const ReservoirState& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.dofs.size(); ++i) {
        d = std::max(d, std::abs(a.dofs[i].p - b.dofs[i].p) / std::abs(b.dofs[i].p));
        d = std::max(d, std::abs(a.dofs[i].T - b.dofs[i].T) / b.dofs[i].T);
        d = std::max(d, std::abs(a.dofs[i].sg - b.dofs[i].sg));
    }
    for (std::size_t w = 0; w < a.wells.size(); ++w)
        d = std::max(d, std::abs(a.wells[w].p - b.wells[w].p) / std::abs(b.wells[w].p));
    return d;
}

struct Abort {};

}  // namespace

TEST(Config, MinimalScenarioParses) {
    const ScenarioConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.name, "tiny");
    EXPECT_EQ(c.mesh.cells, (std::array<int, 3>{2, 2, 2}));
    EXPECT_DOUBLE_EQ(c.mesh.box.max.z(), 50.0);
    EXPECT_DOUBLE_EQ((*c.rock.matrix.permeability)(1, 1), 1e-13);
    EXPECT_DOUBLE_EQ((*c.rock.matrix.permeability)(0, 1), 0.0);
    ASSERT_EQ(c.stages.size(), 1u);
    EXPECT_DOUBLE_EQ(c.stages[0].duration, 1000.0);
}

TEST(Config, UnknownKeysAreRejectedWithTheirPath) {
    const auto e = error_of(with(kMinimal, [](auto& j) { j["rock"]["matrix"]["porosty"] = 0.1; }));
    EXPECT_NE(e.find("/rock/matrix"), std::string::npos) << e;
    EXPECT_NE(e.find("porosty"), std::string::npos) << e;
}

TEST(Config, ErrorsNameTheKey) {
    auto e = error_of(with(kMinimal, [](auto& j) { j["stages"][0]["duration_s"] = "long"; }));
    EXPECT_NE(e.find("/stages/0/duration_s"), std::string::npos) << e;
    e = error_of(with(kMinimal, [](auto& j) { j["rock"]["matrix"].erase("porosity"); }));
    EXPECT_NE(e.find("porosity"), std::string::npos) << e;
    e = error_of(with(kMinimal, [](auto& j) { j["mesh"]["cartesian"]["cells"] = {2, 2}; }));
    EXPECT_NE(e.find("/mesh/cartesian/cells"), std::string::npos) << e;
    e = error_of(with(kMinimal, [](auto& j) { j["wells"] = {{{"name", "w"}, {"kind", "sideways"}}}; }));
    EXPECT_NE(e.find("/wells/0/kind"), std::string::npos) << e;
    e = error_of("{ not json");
    EXPECT_FALSE(e.empty());
}

TEST(Config, FormatRoundTrips) {
    for (int level = 1; level <= 3; ++level) {
        const std::string once = format_config(builtin_case41(level));
        EXPECT_EQ(format_config(parse_config(once)), once) << "level " << level;
    }
}

TEST(Config, BuiltinVerticalProducerCase) {
    const ScenarioConfig c = builtin_case41(1);
    EXPECT_EQ(c.mesh.cells, (std::array<int, 3>{10, 10, 5}));
    EXPECT_EQ(builtin_case41(3).mesh.cells, (std::array<int, 3>{40, 40, 20}));
    ASSERT_EQ(c.wells.size(), 1u);
    EXPECT_EQ(c.wells[0].kind, WellKind::Production);
    EXPECT_DOUBLE_EQ(c.wells[0].q_limit, 200.0 / 3.6);
    EXPECT_DOUBLE_EQ(c.wells[0].p_limit, 1e5);
    EXPECT_DOUBLE_EQ(c.wells[0].radius, 0.1);
    ASSERT_EQ(c.stages.size(), 2u);
    EXPECT_TRUE(c.stages[0].until_stationary);
    EXPECT_DOUBLE_EQ(c.stages[1].duration, 30.0 * 86400.0);

    // top temperature one kelvin below boiling at 4 MPa, boiling point by bisection on p_sat
    const FluidEos eos(c.eos);
    double lo = 300.0, hi = 700.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (eos.p_sat(mid) < 4e6 ? lo : hi) = mid;
    }
    ASSERT_EQ(c.stages[0].dirichlet.size(), 1u);
    EXPECT_NEAR(c.stages[0].dirichlet[0].temperature, 0.5 * (lo + hi) - 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(c.stages[0].dirichlet[0].pressure, 4e6);
}

TEST(Config, FileLoadingResolvesTheMeshPath) {
    const fs::path dir = scratch("load");
    std::ofstream(dir / "two.dfm") << two_hex_fracture_text();
    auto j = nlohmann::json::parse(kMinimal);
    j["mesh"] = {{"file", "two.dfm"}};
    std::ofstream(dir / "s.json") << j.dump(2);
    const ScenarioConfig c = load_config(dir / "s.json");
    EXPECT_EQ(c.mesh.file, dir / "two.dfm");
    EXPECT_EQ(build_mesh(c.mesh).num_cells(), 2u);
    EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
}

TEST(Output, GasVolumeIsSaturationTimesPoreVolume) {
    const auto mesh = build_cartesian_mesh(3, 2, 2, Box{Vec3::Zero(), Vec3(30, 20, 10)});
    const FlowModel model = make_model(mesh);
    ReservoirState x;
    DofState s;
    s.context = PhaseContext::TwoPhase;
    s.p = 2e6;
    s.sg = 0.3;
    complete_state(s, model.eos());
    x.dofs.assign(model.layout().total(), s);
    EXPECT_NEAR(reservoir_gas_volume(model, x), 0.3 * 0.15 * 6000.0, 1e-9);
}

TEST(Output, VtkFilesHaveConsistentCounts) {
    const fs::path dir = scratch("vtk");
    const auto mesh = fractured_block();
    const FlowModel model = make_model(mesh);
    std::mt19937_64 rng(8);
    const ReservoirState x = random_reservoir_state(rng, model);
    write_vtk_cells(dir / "c.vtk", model, x, true);
    const auto v = read_vtk(dir / "c.vtk");
    EXPECT_EQ(v.points, static_cast<int>(mesh.num_nodes()));
    EXPECT_EQ(v.cells, static_cast<int>(mesh.num_cells()));
    EXPECT_EQ(v.cell_types, v.cells);
    EXPECT_EQ(v.cell_list_size, v.cells * 9);
    for (const char* f : {"pressure_Pa", "temperature_K", "gas_saturation"}) {
        ASSERT_EQ(v.cell_data.count(f), 1u) << f;
        EXPECT_EQ(v.cell_data.at(f).size(), mesh.num_cells());
        ASSERT_EQ(v.point_data.count(f), 1u) << f;
        EXPECT_EQ(v.point_data.at(f).size(), mesh.num_nodes());
    }
    const int K = model.layout().cell(2);
    EXPECT_DOUBLE_EQ(v.cell_data.at("pressure_Pa")[2], x.dofs[K].p);

    write_vtk_fractures(dir / "f.vtk", model, x);
    const auto f = read_vtk(dir / "f.vtk");
    EXPECT_EQ(f.cells, static_cast<int>(mesh.num_fracture_faces()));
    EXPECT_EQ(f.cell_data.at("gas_saturation").size(), mesh.num_fracture_faces());
}

TEST(Output, CsvWriterChecksTheRowLength) {
    const fs::path dir = scratch("csv");
    CsvWriter w(dir / "t.csv", {"a", "b"});
    w.row({"1", CsvWriter::num(0.1)});
    EXPECT_THROW(w.row({"1"}), Error);
    EXPECT_EQ(CsvWriter::num(0.1), "0.10000000000000001");
}

TEST(Output, HeadersListEveryWell) {
    const auto ts = timeseries_header({"a", "b"});
    const std::vector<std::string> expect{"stage",          "step",          "time_s",           "dt_s",
                                          "reservoir_gas_volume_m3", "a_gas_volume_m3", "a_bhp_Pa",
                                          "a_rate_kg_per_s", "a_mode",        "b_gas_volume_m3",  "b_bhp_Pa",
                                          "b_rate_kg_per_s", "b_mode"};
    EXPECT_EQ(ts, expect);
    const auto d = diagnostics_header({"a"});
    EXPECT_EQ(d.size(), 9u + 4u);
    EXPECT_EQ(d.back(), "a_complementarity");
    EXPECT_EQ(profile_header().size(), 10u);
}

TEST(Checkpoint, RoundTripIsExact) {
    const fs::path dir = scratch("ck");
    const auto mesh = fractured_block();
    const FlowModel base = make_model(mesh);
    const Well w = vertical_producer(mesh, 0.0, 0.0, base.rock().cell_perm);
    const FlowModel model = base.with_stage(DirichletData{}, {w});
    std::mt19937_64 rng(12);
    Checkpoint c;
    c.stage = 1;
    c.time = 1234.5678901234567;
    c.dt = 0.1;
    c.steps = 17;
    c.well_names = {"prod"};
    c.state = random_reservoir_state(rng, model);
    c.traces = opening_traces(model, c.state);
    write_checkpoint(dir / "c.txt", c);
    const Checkpoint r = read_checkpoint(dir / "c.txt");
    EXPECT_EQ(r.stage, 1);
    EXPECT_EQ(r.time, c.time);
    EXPECT_EQ(r.steps, 17);
    EXPECT_EQ(r.well_names, c.well_names);
    ASSERT_EQ(r.state.dofs.size(), c.state.dofs.size());
    for (std::size_t i = 0; i < r.state.dofs.size(); ++i) {
        EXPECT_EQ(r.state.dofs[i].p, c.state.dofs[i].p);
        EXPECT_EQ(r.state.dofs[i].sg, c.state.dofs[i].sg);
        EXPECT_EQ(r.state.dofs[i].context, c.state.dofs[i].context);
    }
    EXPECT_EQ(r.state.wells[0].p, c.state.wells[0].p);
    EXPECT_EQ(r.state.wells[0].mode, c.state.wells[0].mode);
    EXPECT_EQ(r.traces[0].dp, c.traces[0].dp);
    EXPECT_EQ(r.traces[0].sg, c.traces[0].sg);

    std::ofstream(dir / "bad.txt") << "geovag-checkpoint 1\nstage x\n";
    EXPECT_THROW(read_checkpoint(dir / "bad.txt"), ConfigError);
}

TEST(Scenario, DryRunDescribesTheModel) {
    ScenarioRunner runner(builtin_case41(1));
    std::ostringstream os;
    runner.describe(os);
    EXPECT_NE(os.str().find("nodes 726"), std::string::npos) << os.str();
    EXPECT_NE(os.str().find("cells 500"), std::string::npos) << os.str();
}

TEST(Scenario, TablesFollowTheAcceptedSteps) {
    const fs::path dir = scratch("run");
    ScenarioRunner runner(small_case());
    RunOptions opt;
    opt.output = dir;
    std::vector<int> steps(2, 0);
    opt.on_step = [&](int st, const StepRecord&, const Simulator&) { ++steps[st]; };
    const auto sum = runner.run(opt);
    ASSERT_EQ(sum.size(), 2u);
    EXPECT_TRUE(sum[0].stationary);
    EXPECT_DOUBLE_EQ(sum[1].time, 2.0 * 86400.0);

    const auto diag = read_csv(dir / "diagnostics.csv");
    const auto ts = read_csv(dir / "timeseries.csv");
    EXPECT_EQ(diag.front(), diagnostics_header({"producer"}));
    EXPECT_EQ(ts.front(), timeseries_header({"producer"}));
    EXPECT_EQ(static_cast<int>(diag.size()) - 1, steps[0] + steps[1]);
    EXPECT_EQ(static_cast<int>(ts.size()) - 1, steps[0] + steps[1]);
    for (std::size_t r = 1; r < ts.size(); ++r) {
        ASSERT_EQ(ts[r].size(), ts.front().size());
        EXPECT_EQ(ts[r].back(), ts[r][0] == "1" ? "closed" : "rate") << "row " << r;
    }
    const auto prof = read_csv(dir / "well_profiles.csv");
    EXPECT_EQ(prof.front(), profile_header());
    EXPECT_GT(prof.size(), 1u);

    EXPECT_TRUE(fs::exists(dir / "checkpoint_stage1.txt"));
    EXPECT_TRUE(fs::exists(dir / "checkpoint_stage2.txt"));
    EXPECT_TRUE(fs::exists(dir / "vtk" / "stage1_step00000_cells.vtk"));
    const auto v = read_vtk(dir / "vtk" / "stage1_step00000_cells.vtk");
    EXPECT_EQ(v.cells, 48);
}

TEST(Scenario, RestartFromACheckpointReproducesTheRun) {
    const fs::path full = scratch("full"), part = scratch("part");
    ScenarioRunner a(small_case());
    RunOptions opt;
    opt.output = full;
    a.run(opt);

    ScenarioRunner b(small_case());
    opt.output = part;
    opt.on_step = [](int st, const StepRecord& r, const Simulator&) {
        if (st == 1 && r.step == 8) throw Abort{};
    };
    EXPECT_THROW(b.run(opt), Abort);
    const Checkpoint ck = read_checkpoint(part / "checkpoint.txt");
    EXPECT_EQ(ck.stage, 1);
    EXPECT_EQ(ck.steps, 8);

    ScenarioRunner c(small_case());
    opt.on_step = {};
    opt.checkpoint_from = part / "checkpoint.txt";
    c.run(opt);
    EXPECT_LE(max_state_difference(c.final_state(), a.final_state()), 1e-10);
    EXPECT_EQ(read_csv(part / "diagnostics.csv").size(), read_csv(full / "diagnostics.csv").size());
}

TEST(Scenario, StageEndCheckpointStartsTheNextStage) {
    const fs::path full = scratch("st_full"), part = scratch("st_part");
    ScenarioRunner a(small_case());
    RunOptions opt;
    opt.output = full;
    a.run(opt);

    ScenarioRunner b(small_case());
    opt.output = part;
    opt.checkpoint_from = full / "checkpoint_stage1.txt";
    const auto sum = b.run(opt);
    ASSERT_EQ(sum.size(), 1u);
    EXPECT_EQ(sum[0].name, "production");
    EXPECT_LE(max_state_difference(b.final_state(), a.final_state()), 1e-10);
}

TEST(Scenario, StageLimitStopsEarly) {
    ScenarioRunner r(small_case());
    RunOptions opt;
    opt.write_files = false;
    opt.last_stage = 1;
    EXPECT_EQ(r.run(opt).size(), 1u);
    EXPECT_TRUE(r.final_model().wells().empty());
    opt.last_stage = 3;
    EXPECT_THROW(r.run(opt), ConfigError);
}
