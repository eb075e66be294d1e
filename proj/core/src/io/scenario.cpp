#include "geovag/io/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>

#include "geovag/error.hpp"

namespace geovag {

namespace {

constexpr double kYear = 365.25 * 86400.0;

bool inside(const Box& b, const Vec3& x) {
    return (x.array() >= b.min.array()).all() && (x.array() <= b.max.array()).all();
}

void apply_props(const RockProps& p, Eigen::Matrix3d* perm, double* porosity, double* cond, double* heat) {
    if (p.permeability && perm) *perm = *p.permeability;
    if (p.porosity) *porosity = *p.porosity;
    if (p.conductivity) *cond = *p.conductivity;
    if (p.heat_capacity) *heat = *p.heat_capacity;
}

std::vector<int> names_index(const std::vector<std::string>& names, const std::string& name) {
    std::vector<int> out;
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace

DfmMesh build_mesh(const MeshSource& src) {
    if (!src.file.empty()) return load_dfm_mesh(src.file);
    return build_cartesian_mesh(src.cells[0], src.cells[1], src.cells[2], src.box);
}

RockField build_rock(const DfmMesh& mesh, const RockConfig& cfg) {
    const RockProps& m = cfg.matrix;
    if (!m.permeability || !m.porosity || !m.conductivity || !m.heat_capacity)
        throw ConfigError("rock: matrix properties are incomplete");
    RockField r = RockField::uniform(mesh, 1.0, *m.porosity, *m.conductivity, *m.heat_capacity);
    std::fill(r.cell_perm.begin(), r.cell_perm.end(), *m.permeability);
    std::fill(r.fracture_perm.begin(), r.fracture_perm.end(), (*m.permeability)(0, 0));
    for (std::size_t k = 0; k < mesh.num_cells(); ++k)
        for (const auto& reg : cfg.regions)
            if (inside(reg.box, mesh.cells()[k].center))
                apply_props(reg.props, &r.cell_perm[k], &r.cell_porosity[k], &r.cell_conductivity[k],
                            &r.cell_heat_capacity[k]);
    const RockProps& f = cfg.fracture;
    for (std::size_t j = 0; j < mesh.num_fracture_faces(); ++j) {
        if (f.permeability) r.fracture_perm[j] = (*f.permeability)(0, 0);
        apply_props(f, nullptr, &r.fracture_porosity[j], &r.fracture_conductivity[j], &r.fracture_heat_capacity[j]);
    }
    r.matrix_relperm = {RelPermLaw{cfg.matrix_relperm_exponent[0]}, RelPermLaw{cfg.matrix_relperm_exponent[1]}};
    r.fracture_relperm = {RelPermLaw{cfg.fracture_relperm_exponent[0]}, RelPermLaw{cfg.fracture_relperm_exponent[1]}};
    r.validate(mesh);
    return r;
}

std::vector<Well> build_wells(const DfmMesh& mesh, const RockField& rock, const std::vector<WellConfig>& cfg) {
    std::vector<Well> wells;
    std::vector<WellGeometry> geoms;
    for (const WellConfig& c : cfg) {
        std::vector<std::array<int, 2>> edges;
        if (c.vertical_line) {
            edges = vertical_line_edges(mesh, (*c.vertical_line)[0], (*c.vertical_line)[1]);
            if (edges.empty())
                throw ConfigError("well '" + c.name + "': fewer than two mesh nodes on the vertical line");
        } else if (!c.mesh_well.empty()) {
            const auto it = std::find_if(mesh.wells().begin(), mesh.wells().end(),
                                         [&](const WellSpec& s) { return s.name == c.mesh_well; });
            if (it == mesh.wells().end()) throw ConfigError("well '" + c.name + "': mesh has no well '" + c.mesh_well + "'");
            edges = it->edges;
        } else {
            edges = c.edges;
        }
        Well w;
        w.geometry = build_well(mesh, edges, c.radius, c.name);
        w.kind = c.kind;
        w.p_limit = c.p_limit;
        w.q_limit = c.q_limit;
        w.injection_enthalpy = c.injection_enthalpy;
        w.hydrostatics = c.hydrostatics;
        if (!c.well_index.empty()) {
            if (c.well_index.size() != w.geometry.size())
                throw ConfigError("well '" + c.name + "': well_index_m3 needs one value per well node (" +
                                  std::to_string(w.geometry.size()) + ")");
            w.wi = c.well_index;
        } else {
            w.wi = peaceman_index(mesh, w.geometry, rock.cell_perm);
        }
        geoms.push_back(w.geometry);
        wells.push_back(std::move(w));
    }
    check_disjoint_wells(geoms);
    return wells;
}

DirichletData build_dirichlet(const DfmMesh& mesh, const FluidEos& eos, const std::vector<DirichletConfig>& cfg,
                              const ReservoirState* current) {
    DirichletData d;
    d.mask.assign(mesh.num_nodes(), 0);
    d.values.assign(mesh.num_nodes(), DofState{});
    for (const DirichletConfig& c : cfg) {
        std::vector<int> nodes = c.nodes;
        for (const auto& tag : c.tags) {
            if (!mesh.node_sets().count(tag)) throw ConfigError("dirichlet: unknown node tag '" + tag + "'");
            const auto& set = mesh.node_set(tag);
            nodes.insert(nodes.end(), set.begin(), set.end());
        }
        DofState fixed;
        if (!c.freeze) {
            fixed.p = c.pressure;
            fixed.T = c.temperature;
            fixed.context = classify_fresh(fixed.p, fixed.T, eos);
            if (fixed.context == PhaseContext::TwoPhase) fixed.sg = 0.0;
            complete_state(fixed, eos);
        } else if (!current) {
            throw ConfigError("dirichlet: frozen values need a state at the stage start");
        }
        for (int s : nodes) {
            if (s < 0 || s >= static_cast<int>(mesh.num_nodes()))
                throw ConfigError("dirichlet: node " + std::to_string(s) + " out of range");
            d.mask[s] = 1;
            d.values[s] = c.freeze ? current->dofs[s] : fixed;
        }
    }
    return d;
}

double stationarity_rate(const ReservoirState& a, const ReservoirState& b, double dt) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dofs.size(); ++i) {
        const DofState &x = a.dofs[i], &y = b.dofs[i];
        m = std::max({m, std::abs(x.p - y.p) / std::abs(y.p), std::abs(x.T - y.T) / y.T, std::abs(x.sg - y.sg)});
    }
    return m / (dt / kYear);
}

double stationarity_residual(const Assembler& assembler, const ReservoirState& x,
                             const std::vector<WellTrace>& traces) {
    const StepContext ctx = prepare_step(assembler.model(), x, kYear, traces);
    return residual_norm(assembler.residual(x, ctx));
}

ScenarioRunner::ScenarioRunner(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.stages.empty()) throw ConfigError("config: /stages: at least one stage is required");
    cfg_.solver.validate();
    eos_ = FluidEos(cfg_.eos);
    mesh_ = build_mesh(cfg_.mesh);
    rock_ = build_rock(mesh_, cfg_.rock);
    wells_ = build_wells(mesh_, rock_, cfg_.wells);
    for (std::size_t s = 0; s < cfg_.stages.size(); ++s)
        for (const auto& d : cfg_.stages[s].dirichlet)
            for (const auto& tag : d.tags)
                if (!mesh_.node_sets().count(tag))
                    throw ConfigError("config: /stages/" + std::to_string(s) + "/dirichlet: unknown node tag '" +
                                      tag + "'");
}

FlowModel ScenarioRunner::stage_model(int stage, const ReservoirState* current) const {
    const StageConfig& st = cfg_.stages.at(stage);
    std::vector<Well> open;
    for (const auto& name : st.open_wells)
        for (const Well& w : wells_)
            if (w.geometry.name == name) open.push_back(w);
    return FlowModel(mesh_, rock_, eos_, cfg_.gravity, cfg_.fractions, cfg_.fluid_conductivity,
                     build_dirichlet(mesh_, eos_, st.dirichlet, current), std::move(open), cfg_.scaling);
}

ReservoirState ScenarioRunner::initial_state() const {
    const FlowModel base(mesh_, rock_, eos_, cfg_.gravity, cfg_.fractions, cfg_.fluid_conductivity,
                         DirichletData{std::vector<char>(mesh_.num_nodes(), 0), std::vector<DofState>(mesh_.num_nodes())},
                         {}, cfg_.scaling);
    const auto& in = cfg_.initial;
    const double T = in.temperature ? *in.temperature : eos_.t_sat(in.pressure) + *in.saturation_offset;
    return hydrostatic_state(base, in.pressure, in.reference_z, T);
}

void ScenarioRunner::describe(std::ostream& os) const {
    const DofLayout L = DofLayout::of(mesh_);
    os << "scenario " << cfg_.name << '\n';
    os << "nodes " << L.nodes << "\nfracture_faces " << L.fractures << "\ncells " << L.cells << '\n';
    os << "control_volumes " << L.total() << '\n';
    const ReservoirState x0 = initial_state();
    for (std::size_t s = 0; s < cfg_.stages.size(); ++s) {
        const StageConfig& st = cfg_.stages[s];
        const DirichletData d = build_dirichlet(mesh_, eos_, st.dirichlet, &x0);
        const int nd = static_cast<int>(std::count(d.mask.begin(), d.mask.end(), 1));
        const int nw = static_cast<int>(st.open_wells.size());
        os << "stage " << s + 1 << ' ' << st.name << ": dirichlet_nodes " << nd << ", open_wells " << nw
           << ", unknowns " << 2 * L.total() + nw << ", reduced_unknowns " << 2 * (L.nodes + L.fractures) + nw
           << ", duration_s " << st.duration << (st.until_stationary ? " (until stationary)" : "") << '\n';
    }
}

std::vector<StageSummary> ScenarioRunner::run(const RunOptions& opt) {
    const int nstages = static_cast<int>(cfg_.stages.size());
    const int last = opt.last_stage > 0 ? opt.last_stage : nstages;
    if (last > nstages) throw ConfigError("stage " + std::to_string(last) + " does not exist");
    const std::filesystem::path dir = opt.output.empty() ? cfg_.output.directory : opt.output;
    const OutputConfig& oc = cfg_.output;

    std::vector<std::string> all_names;
    for (const Well& w : wells_) all_names.push_back(w.geometry.name);

    int first = 0;
    std::optional<Checkpoint> ck;
    std::vector<std::string> prev_names;
    std::vector<WellState> prev_wells;
    std::vector<WellTrace> prev_traces;
    if (opt.checkpoint_from) {
        ck = read_checkpoint(*opt.checkpoint_from);
        if (ck->state.dofs.size() != static_cast<std::size_t>(DofLayout::of(mesh_).total()))
            throw ConfigError("checkpoint does not match the mesh");
        if (ck->stage < 0 || ck->stage >= nstages) throw ConfigError("checkpoint stage out of range");
        first = ck->stage;
        state_ = ck->state;
        prev_names = ck->well_names;
        prev_wells = ck->state.wells;
        prev_traces = ck->traces;
        // a checkpoint at time 0 marks the start of a stage
        if (ck->time == 0.0 && ck->steps == 0) ck.reset();
    } else {
        state_ = initial_state();
        state_.wells.clear();
    }

    const bool append = opt.checkpoint_from.has_value();
    CsvWriter ts, diag, prof;
    if (opt.write_files) {
        std::filesystem::create_directories(dir);
        ts = CsvWriter(dir / "timeseries.csv", timeseries_header(all_names), append);
        diag = CsvWriter(dir / "diagnostics.csv", diagnostics_header(all_names), append);
        prof = CsvWriter(dir / "well_profiles.csv", profile_header(), append);
    }

    std::vector<StageSummary> out;
    for (int st = first; st < last; ++st) {
        const StageConfig& S = cfg_.stages[st];
        model_ = std::make_unique<FlowModel>(stage_model(st, &state_));
        const FlowModel& model = *model_;

        // wells: keep state and trace of wells that stay open, open the others at their root pressure
        ReservoirState x = state_;
        x.wells.clear();
        std::vector<int> kept;
        for (const Well& w : model.wells()) {
            const auto idx = names_index(prev_names, w.geometry.name);
            kept.push_back(idx.empty() ? -1 : idx[0]);
            x.wells.push_back(idx.empty() ? WellState{x.dofs[w.geometry.root()].p, WellMode::Rate, false}
                                          : prev_wells[idx[0]]);
        }
        std::vector<WellTrace> traces = opening_traces(model, x);
        for (std::size_t w = 0; w < kept.size(); ++w)
            if (kept[w] >= 0) traces[w] = prev_traces[kept[w]];

        SolverConfig sc = cfg_.solver;
        sc.time = S.time;
        Simulator sim(model, x, sc, traces);
        if (ck) {
            sim.restore(ck->time, ck->dt, ck->steps, x, traces);
            ck.reset();
        }
        if (opt.on_stage_start) opt.on_stage_start(st, sim);

        auto checkpoint = [&](const std::filesystem::path& path, bool stage_end) {
            Checkpoint c;
            c.stage = stage_end ? st + 1 : st;
            c.time = stage_end ? 0.0 : sim.time();
            c.dt = sim.dt();
            c.steps = stage_end ? 0 : sim.steps();
            for (const Well& w : model.wells()) c.well_names.push_back(w.geometry.name);
            c.state = sim.state();
            c.traces = sim.traces();
            write_checkpoint(path, c);
        };
        auto vtk = [&](int step) {
            std::ostringstream stem;
            stem << "stage" << st + 1 << "_step" << std::setw(5) << std::setfill('0') << step;
            write_vtk_cells(dir / "vtk" / (stem.str() + "_cells.vtk"), model, sim.state(), oc.node_fields);
            if (mesh_.num_fracture_faces() > 0)
                write_vtk_fractures(dir / "vtk" / (stem.str() + "_fractures.vtk"), model, sim.state());
        };
        auto profiles = [&](int step) {
            for (const auto& row : profile_rows(st + 1, step, sim.time(), model, sim.traces())) prof.row(row);
        };

        StageSummary sum;
        sum.name = S.name;
        if (opt.write_files && sim.steps() == 0) vtk(0);
        ReservoirState before = sim.state();
        std::optional<Assembler> probe;
        if (S.until_stationary) probe.emplace(model);
        try {
            while (sim.time() < S.duration) {
                const StepRecord r = sim.advance(S.duration);
                ++sum.steps;
                sum.newton += r.newton;
                sum.linear += r.linear;
                if (opt.write_files) {
                    ts.row(timeseries_row(st + 1, r, model, sim.state(), sim.traces(), all_names));
                    diag.row(diagnostics_row(st + 1, r, model, all_names));
                    if (oc.vtk_every_steps > 0 && r.step % oc.vtk_every_steps == 0) vtk(r.step);
                    if (oc.profile_every_steps > 0 && r.step % oc.profile_every_steps == 0) profiles(r.step);
                    if (oc.checkpoint_every_steps > 0 && r.step % oc.checkpoint_every_steps == 0)
                        checkpoint(dir / "checkpoint.txt", false);
                }
                if (opt.on_step) opt.on_step(st, r, sim);
                if (S.until_stationary) {
                    const double rate = std::max(stationarity_rate(sim.state(), before, r.dt),
                                                 stationarity_residual(*probe, sim.state(), sim.traces()));
                    if (rate < S.stationarity_tolerance) {
                        sum.stationary = true;
                        break;
                    }
                }
                before = sim.state();
            }
        } catch (const SolverError&) {
            if (opt.write_files) checkpoint(dir / "checkpoint_abort.txt", false);
            throw;
        }
        sum.time = sim.time();
        if (opt.write_files) {
            if (oc.vtk_every_steps <= 0 || sim.steps() % oc.vtk_every_steps != 0) vtk(sim.steps());
            if (!model.wells().empty() && (oc.profile_every_steps <= 0 || sim.steps() % oc.profile_every_steps != 0))
                profiles(sim.steps());
            checkpoint(dir / ("checkpoint_stage" + std::to_string(st + 1) + ".txt"), true);
        }
        if (opt.log) {
            *opt.log << "stage " << st + 1 << ' ' << S.name << ": " << sum.steps << " steps, t = " << sum.time
                     << " s, avg Newton " << (sum.steps ? double(sum.newton) / sum.steps : 0.0) << ", avg GMRES "
                     << (sum.newton ? double(sum.linear) / sum.newton : 0.0)
                     << (sum.stationary ? ", stationary" : "") << '\n';
        }
        state_ = sim.state();
        prev_names.clear();
        for (const Well& w : model.wells()) prev_names.push_back(w.geometry.name);
        prev_wells = state_.wells;
        prev_traces = sim.traces();
        out.push_back(sum);
    }
    return out;
}

void describe_mesh(const DfmMesh& mesh, std::ostream& os) {
    os << "nodes " << mesh.num_nodes() << '\n';
    std::map<std::string, int> shapes;
    static const char* names[] = {"tetrahedron", "pyramid", "wedge", "hexahedron"};
    for (const Cell& c : mesh.cells()) ++shapes[names[static_cast<int>(c.shape)]];
    os << "cells " << mesh.num_cells();
    for (const auto& [k, v] : shapes) os << ' ' << k << '=' << v;
    os << "\nfaces " << mesh.num_faces() << "\nedges " << mesh.edges().size() << "\nfracture_faces "
       << mesh.num_fracture_faces() << '\n';
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max()), hi = -lo;
    for (const Vec3& x : mesh.nodes()) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    if (mesh.num_nodes())
        os << "bounding_box " << lo.transpose() << " .. " << hi.transpose() << '\n';
    os << "volume " << mesh.total_volume() << '\n';
    for (const auto& [tag, nodes] : mesh.node_sets()) os << "node_set " << tag << ' ' << nodes.size() << '\n';
    for (const auto& w : mesh.wells()) os << "well " << w.name << " edges " << w.edges.size() << '\n';
    for (const auto& w : mesh.warnings()) os << "warning " << w << '\n';
}

}  // namespace geovag
