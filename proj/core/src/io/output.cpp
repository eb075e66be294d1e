#include "geovag/io/output.hpp"

#include <cstdio>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path, bool append = false) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.precision(17);
    return out;
}

void write_points(std::ostream& out, const DfmMesh& mesh) {
    out << "POINTS " << mesh.num_nodes() << " double\n";
    for (const Vec3& x : mesh.nodes()) out << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
}

void write_scalars(std::ostream& out, const char* name, const std::vector<double>& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double d : v) out << d << '\n';
}

void write_state_fields(std::ostream& out, const ReservoirState& s, int begin, int count) {
    std::vector<double> p(count), T(count), sg(count);
    for (int i = 0; i < count; ++i) {
        const DofState& d = s.dofs[begin + i];
        p[i] = d.p;
        T[i] = d.T;
        sg[i] = d.sg;
    }
    write_scalars(out, "pressure_Pa", p);
    write_scalars(out, "temperature_K", T);
    write_scalars(out, "gas_saturation", sg);
}

}  // namespace

void write_vtk_cells(const std::filesystem::path& path, const FlowModel& model, const ReservoirState& state,
                     bool node_fields) {
    const DfmMesh& mesh = model.mesh();
    std::ofstream out = open_for_write(path);
    out << "# vtk DataFile Version 3.0\ngeovag cells\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    write_points(out, mesh);
    std::size_t size = 0;
    for (const Cell& c : mesh.cells()) size += c.nodes.size() + 1;
    out << "CELLS " << mesh.num_cells() << ' ' << size << '\n';
    for (const Cell& c : mesh.cells()) {
        out << c.nodes.size();
        for (int s : c.nodes) out << ' ' << s;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (const Cell& c : mesh.cells()) out << vtk_cell_type(c.shape) << '\n';
    const DofLayout& L = model.layout();
    out << "CELL_DATA " << mesh.num_cells() << '\n';
    write_state_fields(out, state, L.cell(0), L.cells);
    if (node_fields) {
        out << "POINT_DATA " << mesh.num_nodes() << '\n';
        write_state_fields(out, state, 0, L.nodes);
    }
    if (!out) throw ConfigError("write failed: " + path.string());
}

void write_vtk_fractures(const std::filesystem::path& path, const FlowModel& model, const ReservoirState& state) {
    const DfmMesh& mesh = model.mesh();
    std::ofstream out = open_for_write(path);
    out << "# vtk DataFile Version 3.0\ngeovag fracture faces\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    write_points(out, mesh);
    const auto& ff = mesh.fracture_faces();
    std::size_t size = 0;
    for (const auto& f : ff) size += mesh.faces()[f.face].nodes.size() + 1;
    out << "CELLS " << ff.size() << ' ' << size << '\n';
    for (const auto& f : ff) {
        const auto& nodes = mesh.faces()[f.face].nodes;
        out << nodes.size();
        for (int s : nodes) out << ' ' << s;
        out << '\n';
    }
    out << "CELL_TYPES " << ff.size() << '\n';
    for (std::size_t j = 0; j < ff.size(); ++j) out << 7 << '\n';
    out << "CELL_DATA " << ff.size() << '\n';
    write_state_fields(out, state, model.layout().fracture(0), model.layout().fractures);
    if (!out) throw ConfigError("write failed: " + path.string());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, bool append)
    : header_(std::move(header)) {
    const bool fresh = !append || !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    out_ = open_for_write(path, append);
    if (fresh) row(header_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
        throw ConfigError("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header_.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    out_.flush();
}

std::string CsvWriter::num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> timeseries_header(const std::vector<std::string>& wells) {
    std::vector<std::string> h{"stage", "step", "time_s", "dt_s", "reservoir_gas_volume_m3"};
    for (const auto& w : wells)
        for (const char* f : {"_gas_volume_m3", "_bhp_Pa", "_rate_kg_per_s", "_mode"}) h.push_back(w + f);
    return h;
}

std::vector<std::string> diagnostics_header(const std::vector<std::string>& wells) {
    std::vector<std::string> h{"stage",     "step",     "time_s",   "dt_s",           "newton_iterations",
                               "gmres_iterations", "failures", "residual", "complementarity"};
    for (const auto& w : wells)
        for (const char* f : {"_rate_kg_per_s", "_bhp_Pa", "_mode", "_complementarity"}) h.push_back(w + f);
    return h;
}

std::vector<std::string> profile_header() {
    return {"stage", "step", "time_s", "well", "local_node", "node", "z_m", "pressure_Pa", "temperature_K",
            "gas_saturation"};
}

namespace {
int open_index(const FlowModel& model, const std::string& name) {
    for (std::size_t w = 0; w < model.wells().size(); ++w)
        if (model.wells()[w].geometry.name == name) return static_cast<int>(w);
    return -1;
}
}  // namespace

std::vector<std::string> timeseries_row(int stage, const StepRecord& r, const FlowModel& model,
                                        const ReservoirState& state, const std::vector<WellTrace>& traces,
                                        const std::vector<std::string>& wells) {
    std::vector<std::string> row{CsvWriter::num(stage), CsvWriter::num(r.step), CsvWriter::num(r.time),
                                 CsvWriter::num(r.dt), CsvWriter::num(reservoir_gas_volume(model, state))};
    for (const auto& name : wells) {
        const int w = open_index(model, name);
        if (w < 0) {
            row.insert(row.end(), {"", "", "", "closed"});
            continue;
        }
        row.push_back(CsvWriter::num(well_gas_volume(model.wells()[w], traces[w])));
        row.push_back(CsvWriter::num(r.well_bhp[w]));
        row.push_back(CsvWriter::num(r.well_rate[w]));
        row.push_back(std::string(to_string(r.well_mode[w])));
    }
    return row;
}

std::vector<std::string> diagnostics_row(int stage, const StepRecord& r, const FlowModel& model,
                                         const std::vector<std::string>& wells) {
    std::vector<std::string> row{CsvWriter::num(stage),        CsvWriter::num(r.step),   CsvWriter::num(r.time),
                                 CsvWriter::num(r.dt),         CsvWriter::num(r.newton), CsvWriter::num(r.linear),
                                 CsvWriter::num(r.failures),   CsvWriter::num(r.residual),
                                 CsvWriter::num(r.complementarity)};
    for (const auto& name : wells) {
        const int w = open_index(model, name);
        if (w < 0) {
            row.insert(row.end(), {"", "", "closed", ""});
            continue;
        }
        row.push_back(CsvWriter::num(r.well_rate[w]));
        row.push_back(CsvWriter::num(r.well_bhp[w]));
        row.push_back(std::string(to_string(r.well_mode[w])));
        row.push_back(CsvWriter::num(r.well_complementarity[w]));
    }
    return row;
}

std::vector<std::vector<std::string>> profile_rows(int stage, int step, double time, const FlowModel& model,
                                                   const std::vector<WellTrace>& traces) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t w = 0; w < model.wells().size(); ++w) {
        const Well& well = model.wells()[w];
        const WellTrace& t = traces[w];
        for (std::size_t s = 0; s < well.geometry.size(); ++s)
            rows.push_back({CsvWriter::num(stage), CsvWriter::num(step), CsvWriter::num(time), well.geometry.name,
                            CsvWriter::num(static_cast<int>(s)), CsvWriter::num(well.geometry.nodes[s]),
                            CsvWriter::num(well.geometry.z[s]), CsvWriter::num(t.p[s]), CsvWriter::num(t.T[s]),
                            CsvWriter::num(t.sg[s])});
    }
    return rows;
}

namespace {

void put_vector(std::ostream& out, const char* name, const std::vector<double>& v) {
    out << name << ' ' << v.size();
    for (double d : v) out << ' ' << d;
    out << '\n';
}

class CheckpointReader {
public:
    CheckpointReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("checkpoint " + path_ + ": " + what);
    }
    void expect(const std::string& key) {
        std::string k;
        if (!(in_ >> k) || k != key) fail("expected '" + key + "'");
    }
    template <class T>
    T get() {
        T v;
        if (!(in_ >> v)) fail("truncated or malformed");
        return v;
    }
    template <class T>
    T field(const std::string& key) {
        expect(key);
        return get<T>();
    }
    std::vector<double> vec(const std::string& key) {
        const auto n = field<std::size_t>(key);
        std::vector<double> v(n);
        for (auto& d : v) d = get<double>();
        return v;
    }

private:
    std::istream& in_;
    std::string path_;
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out = open_for_write(tmp);
        out << "geovag-checkpoint 1\n";
        out << "stage " << c.stage << "\ntime " << c.time << "\ndt " << c.dt << "\nsteps " << c.steps << '\n';
        out << "dofs " << c.state.dofs.size() << '\n';
        for (const DofState& d : c.state.dofs)
            out << d.p << ' ' << d.T << ' ' << d.sl << ' ' << d.sg << ' ' << d.cl << ' ' << d.cg << ' '
                << to_string(d.context) << '\n';
        out << "wells " << c.state.wells.size() << '\n';
        for (std::size_t w = 0; w < c.state.wells.size(); ++w) {
            const WellState& ws = c.state.wells[w];
            out << "well " << c.well_names[w] << ' ' << ws.p << ' ' << to_string(ws.mode) << ' ' << ws.mode_set
                << '\n';
            const WellTrace& t = c.traces[w];
            out << "p_root " << t.p_root << '\n';
            put_vector(out, "dp", t.dp);
            put_vector(out, "p", t.p);
            put_vector(out, "T", t.T);
            put_vector(out, "sl", t.sl);
            put_vector(out, "sg", t.sg);
            put_vector(out, "Q_mass", t.Q_mass);
            put_vector(out, "Q_energy", t.Q_energy);
        }
        out << "end\n";
        if (!out) throw ConfigError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint " + path.string());
    CheckpointReader r(in, path.string());
    if (r.field<int>("geovag-checkpoint") != 1) r.fail("unsupported version");
    Checkpoint c;
    c.stage = r.field<int>("stage");
    c.time = r.field<double>("time");
    c.dt = r.field<double>("dt");
    c.steps = r.field<int>("steps");
    c.state.dofs.resize(r.field<std::size_t>("dofs"));
    for (DofState& d : c.state.dofs) {
        d.p = r.get<double>();
        d.T = r.get<double>();
        d.sl = r.get<double>();
        d.sg = r.get<double>();
        d.cl = r.get<double>();
        d.cg = r.get<double>();
        try {
            d.context = context_from_string(r.get<std::string>());
        } catch (const Error&) {
            r.fail("unknown phase context");
        }
    }
    const auto nw = r.field<std::size_t>("wells");
    for (std::size_t w = 0; w < nw; ++w) {
        c.well_names.push_back(r.field<std::string>("well"));
        WellState ws;
        ws.p = r.get<double>();
        const auto mode = r.get<std::string>();
        if (mode == "rate")
            ws.mode = WellMode::Rate;
        else if (mode == "bhp")
            ws.mode = WellMode::Bhp;
        else
            r.fail("unknown well mode '" + mode + "'");
        ws.mode_set = r.get<int>() != 0;
        c.state.wells.push_back(ws);
        WellTrace t;
        t.p_root = r.field<double>("p_root");
        t.dp = r.vec("dp");
        t.p = r.vec("p");
        t.T = r.vec("T");
        t.sl = r.vec("sl");
        t.sg = r.vec("sg");
        t.Q_mass = r.vec("Q_mass");
        t.Q_energy = r.vec("Q_energy");
        c.traces.push_back(std::move(t));
    }
    r.expect("end");
    return c;
}

}  // namespace geovag
