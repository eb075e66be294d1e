#include "geovag/io/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

using nlohmann::json;

namespace {

// JSON object view that remembers its path for error messages and rejects
// unknown keys.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config: " + (path_.empty() ? std::string("/") : path_) + ": " + what);
    }
    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError("config: " + path_ + "/" + key + ": " + what);
    }

    bool has(const std::string& key) const {
        used_.insert(key);
        return j_.contains(key);
    }
    const json& raw(const std::string& key) const {
        used_.insert(key);
        if (!j_.contains(key)) fail(key, "missing required key");
        return j_.at(key);
    }
    Reader object(const std::string& key) const { return Reader(raw(key), path_ + "/" + key); }
    std::string child_path(const std::string& key) const { return path_ + "/" + key; }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, "expected a finite number");
        return d;
    }
    double number(const std::string& key, double def) const { return has(key) ? number(key) : def; }
    double positive(const std::string& key) const {
        const double d = number(key);
        if (!(d > 0.0)) fail(key, "must be positive");
        return d;
    }
    double positive(const std::string& key, double def) const { return has(key) ? positive(key) : def; }
    int integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(key, "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int def) const { return has(key) ? integer(key) : def; }
    bool boolean(const std::string& key, bool def) const {
        if (!has(key)) return def;
        const json& v = raw(key);
        if (!v.is_boolean()) fail(key, "expected true or false");
        return v.get<bool>();
    }
    std::string string(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& def) const { return has(key) ? string(key) : def; }
    std::vector<double> numbers(const std::string& key, std::size_t n = 0) const {
        const json& v = raw(key);
        if (!v.is_array()) fail(key, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail(key, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        if (n && out.size() != n) fail(key, "expected " + std::to_string(n) + " numbers");
        return out;
    }
    std::vector<std::string> strings(const std::string& key) const {
        const json& v = raw(key);
        if (v.is_string()) return {v.get<std::string>()};
        if (!v.is_array()) fail(key, "expected a string or an array of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) fail(key, "expected strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }
    std::vector<Reader> objects(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array()) fail(key, "expected an array");
        std::vector<Reader> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], path_ + "/" + key + "/" + std::to_string(i));
        return out;
    }

    /// Fails on keys that were never queried.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) fail(it.key(), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    mutable std::set<std::string> used_;
};

Box read_box(const Reader& r, const std::string& lo, const std::string& hi) {
    const auto a = r.numbers(lo, 3), b = r.numbers(hi, 3);
    return {Vec3(a[0], a[1], a[2]), Vec3(b[0], b[1], b[2])};
}

RockProps read_rock_props(const Reader& r) {
    RockProps p;
    if (r.has("permeability_m2")) {
        const json& v = r.raw("permeability_m2");
        if (v.is_number()) {
            const double k = r.positive("permeability_m2");
            p.permeability = k * Eigen::Matrix3d::Identity();
        } else {
            const auto k = r.numbers("permeability_m2");
            if (k.size() == 3)
                p.permeability = Eigen::Vector3d(k[0], k[1], k[2]).asDiagonal();
            else if (k.size() == 9)
                p.permeability = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(k.data());
            else
                r.fail("permeability_m2", "expected a number, 3 diagonal values or 9 tensor entries");
        }
    }
    if (r.has("porosity")) {
        p.porosity = r.number("porosity");
        if (!(*p.porosity > 0.0 && *p.porosity <= 1.0)) r.fail("porosity", "must lie in (0, 1]");
    }
    if (r.has("conductivity_W_per_m_K")) p.conductivity = r.number("conductivity_W_per_m_K");
    if (r.has("heat_capacity_J_per_m3_K")) p.heat_capacity = r.number("heat_capacity_J_per_m3_K");
    return p;
}

json rock_props_json(const RockProps& p) {
    json j = json::object();
    if (p.permeability) {
        std::vector<double> k(9);
        Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(k.data()) = *p.permeability;
        j["permeability_m2"] = k;
    }
    if (p.porosity) j["porosity"] = *p.porosity;
    if (p.conductivity) j["conductivity_W_per_m_K"] = *p.conductivity;
    if (p.heat_capacity) j["heat_capacity_J_per_m3_K"] = *p.heat_capacity;
    return j;
}

TimeStepConfig read_time_step(const Reader& r, TimeStepConfig t) {
    t.initial = r.positive("initial_s", t.initial);
    t.max = r.positive("max_s", t.max);
    t.min = r.positive("min_s", t.min);
    t.growth = r.number("growth", t.growth);
    t.cut = r.number("cut", t.cut);
    if (!(t.growth > 1.0)) r.fail("growth", "must exceed 1");
    if (!(t.cut > 0.0 && t.cut < 1.0)) r.fail("cut", "must lie in (0, 1)");
    if (t.max < t.min) r.fail("max_s", "must not be below min_s");
    r.finish();
    return t;
}

json time_step_json(const TimeStepConfig& t) {
    return {{"initial_s", t.initial}, {"max_s", t.max}, {"min_s", t.min}, {"growth", t.growth}, {"cut", t.cut}};
}

void read_eos(const Reader& r, EosParams& e) {
    e.psat_scale = r.number("psat_scale_Pa", e.psat_scale);
    e.psat_a = r.number("psat_a", e.psat_a);
    e.psat_b = r.number("psat_b_K", e.psat_b);
    e.psat_c = r.number("psat_c", e.psat_c);
    e.t_min = r.number("t_min_K", e.t_min);
    e.t_max = r.number("t_max_K", e.t_max);
    e.molar_mass = r.number("molar_mass_kg_per_mol", e.molar_mass);
    e.gas_constant = r.number("gas_constant_J_per_mol_K", e.gas_constant);
    e.liquid_density_ref = r.number("liquid_density_ref_kg_per_m3", e.liquid_density_ref);
    e.p_ref = r.number("p_ref_Pa", e.p_ref);
    e.t_ref = r.number("t_ref_K", e.t_ref);
    e.liquid_compressibility = r.number("liquid_compressibility_per_Pa", e.liquid_compressibility);
    e.liquid_expansion = r.number("liquid_expansion_per_K", e.liquid_expansion);
    e.liquid_expansion2 = r.number("liquid_expansion2_per_K2", e.liquid_expansion2);
    e.gas_virial = r.number("gas_virial_K_per_Pa", e.gas_virial);
    e.liquid_heat_capacity = r.number("liquid_heat_capacity_J_per_kg_K", e.liquid_heat_capacity);
    e.enthalpy_t0 = r.number("enthalpy_t0_K", e.enthalpy_t0);
    e.liquid_visc_a = r.number("liquid_visc_a_Pa_s", e.liquid_visc_a);
    e.liquid_visc_b = r.number("liquid_visc_b_K", e.liquid_visc_b);
    e.liquid_visc_c = r.number("liquid_visc_c_K", e.liquid_visc_c);
    e.gas_visc_ref = r.number("gas_visc_ref_Pa_s", e.gas_visc_ref);
    e.gas_visc_slope = r.number("gas_visc_slope_Pa_s_per_K", e.gas_visc_slope);
    e.gas_visc_t0 = r.number("gas_visc_t0_K", e.gas_visc_t0);
    r.finish();
    try {
        e.validate();
    } catch (const ConfigError& err) {
        r.fail(err.what());
    }
}

json eos_json(const EosParams& e) {
    return {{"psat_scale_Pa", e.psat_scale},
            {"psat_a", e.psat_a},
            {"psat_b_K", e.psat_b},
            {"psat_c", e.psat_c},
            {"t_min_K", e.t_min},
            {"t_max_K", e.t_max},
            {"molar_mass_kg_per_mol", e.molar_mass},
            {"gas_constant_J_per_mol_K", e.gas_constant},
            {"liquid_density_ref_kg_per_m3", e.liquid_density_ref},
            {"p_ref_Pa", e.p_ref},
            {"t_ref_K", e.t_ref},
            {"liquid_compressibility_per_Pa", e.liquid_compressibility},
            {"liquid_expansion_per_K", e.liquid_expansion},
            {"liquid_expansion2_per_K2", e.liquid_expansion2},
            {"gas_virial_K_per_Pa", e.gas_virial},
            {"liquid_heat_capacity_J_per_kg_K", e.liquid_heat_capacity},
            {"enthalpy_t0_K", e.enthalpy_t0},
            {"liquid_visc_a_Pa_s", e.liquid_visc_a},
            {"liquid_visc_b_K", e.liquid_visc_b},
            {"liquid_visc_c_K", e.liquid_visc_c},
            {"gas_visc_ref_Pa_s", e.gas_visc_ref},
            {"gas_visc_slope_Pa_s_per_K", e.gas_visc_slope},
            {"gas_visc_t0_K", e.gas_visc_t0}};
}

WellConfig read_well(const Reader& r) {
    WellConfig w;
    w.name = r.string("name");
    const std::string kind = r.string("kind");
    if (kind == "production")
        w.kind = WellKind::Production;
    else if (kind == "injection")
        w.kind = WellKind::Injection;
    else
        r.fail("kind", "expected 'production' or 'injection'");
    w.radius = r.positive("radius_m", w.radius);
    int sources = 0;
    if (r.has("vertical_line_m")) {
        const auto v = r.numbers("vertical_line_m", 2);
        w.vertical_line = std::array<double, 2>{v[0], v[1]};
        ++sources;
    }
    if (r.has("edges")) {
        const json& e = r.raw("edges");
        if (!e.is_array()) r.fail("edges", "expected an array of [parent, child] pairs");
        for (const auto& pair : e) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
                r.fail("edges", "expected an array of [parent, child] pairs");
            w.edges.push_back({pair[0].get<int>(), pair[1].get<int>()});
        }
        ++sources;
    }
    if (r.has("mesh_well")) {
        w.mesh_well = r.string("mesh_well");
        ++sources;
    }
    if (sources != 1) r.fail("exactly one of vertical_line_m, edges or mesh_well is required");
    w.p_limit = r.number("pressure_limit_Pa", w.p_limit);
    w.q_limit = r.number("rate_limit_kg_per_s", w.q_limit);
    if (w.kind == WellKind::Production && w.q_limit < 0.0) r.fail("rate_limit_kg_per_s", "must be >= 0 for production");
    if (w.kind == WellKind::Injection && w.q_limit > 0.0) r.fail("rate_limit_kg_per_s", "must be <= 0 for injection");
    w.injection_enthalpy = r.number("injection_enthalpy_J_per_kg", w.injection_enthalpy);
    if (r.has("well_index_m3")) w.well_index = r.numbers("well_index_m3");
    w.hydrostatics.corrections = r.integer("hydrostatic_corrections", w.hydrostatics.corrections);
    w.hydrostatics.iterate = r.boolean("hydrostatic_iterate", w.hydrostatics.iterate);
    w.hydrostatics.tolerance = r.positive("hydrostatic_tolerance", w.hydrostatics.tolerance);
    r.finish();
    return w;
}

json well_json(const WellConfig& w) {
    json j = {{"name", w.name},
              {"kind", std::string(to_string(w.kind))},
              {"radius_m", w.radius},
              {"pressure_limit_Pa", w.p_limit},
              {"rate_limit_kg_per_s", w.q_limit},
              {"injection_enthalpy_J_per_kg", w.injection_enthalpy},
              {"hydrostatic_corrections", w.hydrostatics.corrections},
              {"hydrostatic_iterate", w.hydrostatics.iterate},
              {"hydrostatic_tolerance", w.hydrostatics.tolerance}};
    if (w.vertical_line) j["vertical_line_m"] = *w.vertical_line;
    if (!w.edges.empty()) j["edges"] = w.edges;
    if (!w.mesh_well.empty()) j["mesh_well"] = w.mesh_well;
    if (!w.well_index.empty()) j["well_index_m3"] = w.well_index;
    return j;
}

DirichletConfig read_dirichlet(const Reader& r) {
    DirichletConfig d;
    if (r.has("tags")) d.tags = r.strings("tags");
    if (r.has("nodes")) {
        const json& v = r.raw("nodes");
        if (!v.is_array()) r.fail("nodes", "expected an array of node indices");
        for (const auto& e : v) {
            if (!e.is_number_integer() || e.get<int>() < 0) r.fail("nodes", "expected non-negative node indices");
            d.nodes.push_back(e.get<int>());
        }
    }
    if (d.tags.empty() && d.nodes.empty()) r.fail("tags or nodes is required");
    d.freeze = r.boolean("freeze", false);
    if (!d.freeze) {
        d.pressure = r.positive("pressure_Pa");
        d.temperature = r.positive("temperature_K");
    }
    r.finish();
    return d;
}

json dirichlet_json(const DirichletConfig& d) {
    json j = json::object();
    if (!d.tags.empty()) j["tags"] = d.tags;
    if (!d.nodes.empty()) j["nodes"] = d.nodes;
    j["freeze"] = d.freeze;
    if (!d.freeze) {
        j["pressure_Pa"] = d.pressure;
        j["temperature_K"] = d.temperature;
    }
    return j;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    const Reader r(root, "");
    ScenarioConfig c;
    c.name = r.string("name", c.name);

    {
        const Reader m = r.object("mesh");
        if (m.has("file")) {
            c.mesh.file = m.string("file");
            if (c.mesh.file.is_relative() && !base_dir.empty()) c.mesh.file = base_dir / c.mesh.file;
        } else {
            const Reader cart = m.object("cartesian");
            const json& n = cart.raw("cells");
            if (!n.is_array() || n.size() != 3) cart.fail("cells", "expected [nx, ny, nz]");
            for (int i = 0; i < 3; ++i) {
                if (!n[i].is_number_integer() || n[i].get<int>() < 1) cart.fail("cells", "counts must be integers >= 1");
                c.mesh.cells[i] = n[i].get<int>();
            }
            c.mesh.box = read_box(cart, "min_m", "max_m");
            cart.finish();
        }
        m.finish();
    }

    {
        const Reader rock = r.object("rock");
        {
            const Reader m = rock.object("matrix");
            c.rock.matrix = read_rock_props(m);
            m.finish();
        }
        if (!c.rock.matrix.permeability || !c.rock.matrix.porosity || !c.rock.matrix.conductivity ||
            !c.rock.matrix.heat_capacity)
            rock.fail("matrix", "permeability_m2, porosity, conductivity_W_per_m_K and heat_capacity_J_per_m3_K are required");
        if (rock.has("fracture")) {
            const Reader f = rock.object("fracture");
            c.rock.fracture = read_rock_props(f);
            f.finish();
        }
        if (rock.has("regions"))
            for (const Reader& g : rock.objects("regions")) {
                RockRegion reg;
                reg.box = read_box(g, "min_m", "max_m");
                reg.props = read_rock_props(g);
                g.finish();
                c.rock.regions.push_back(reg);
            }
        if (rock.has("relperm_exponents")) {
            const Reader e = rock.object("relperm_exponents");
            c.rock.matrix_relperm_exponent[0] = e.positive("matrix_liquid", 2.0);
            c.rock.matrix_relperm_exponent[1] = e.positive("matrix_gas", 2.0);
            c.rock.fracture_relperm_exponent[0] = e.positive("fracture_liquid", 2.0);
            c.rock.fracture_relperm_exponent[1] = e.positive("fracture_gas", 2.0);
            e.finish();
        }
        rock.finish();
    }

    if (r.has("fluid")) {
        const Reader f = r.object("fluid");
        if (f.has("eos")) read_eos(f.object("eos"), c.eos);
        c.fluid_conductivity.liquid = f.number("liquid_conductivity_W_per_m_K", c.fluid_conductivity.liquid);
        c.fluid_conductivity.gas = f.number("gas_conductivity_W_per_m_K", c.fluid_conductivity.gas);
        f.finish();
    }
    if (r.has("gravity_m_per_s2")) {
        const auto g = r.numbers("gravity_m_per_s2", 3);
        c.gravity = Vec3(g[0], g[1], g[2]);
    }
    if (r.has("volume_fractions")) {
        const Reader v = r.object("volume_fractions");
        c.fractions.omega = v.number("matrix", c.fractions.omega);
        c.fractions.omega_f = v.number("fracture", c.fractions.omega_f);
        if (c.fractions.omega < 0.0 || c.fractions.omega_f < 0.0) v.fail("volume fractions must be >= 0");
        v.finish();
    }
    if (r.has("residual_scaling")) {
        const Reader s = r.object("residual_scaling");
        c.scaling.density = s.positive("density_kg_per_m3", c.scaling.density);
        c.scaling.internal_energy = s.positive("internal_energy_J_per_kg", c.scaling.internal_energy);
        c.scaling.temperature = s.positive("temperature_K", c.scaling.temperature);
        c.scaling.volume_floor_ratio = s.positive("volume_floor_ratio", c.scaling.volume_floor_ratio);
        s.finish();
    }

    {
        const Reader in = r.object("initial");
        const std::string type = in.string("type", "hydrostatic");
        if (type != "hydrostatic") in.fail("type", "only 'hydrostatic' is supported");
        c.initial.pressure = in.positive("pressure_Pa");
        c.initial.reference_z = in.number("reference_z_m", 0.0);
        if (in.has("temperature_K")) c.initial.temperature = in.positive("temperature_K");
        if (in.has("saturation_offset_K")) c.initial.saturation_offset = in.number("saturation_offset_K");
        if (c.initial.temperature.has_value() == c.initial.saturation_offset.has_value())
            in.fail("exactly one of temperature_K or saturation_offset_K is required");
        in.finish();
    }

    if (r.has("wells"))
        for (const Reader& w : r.objects("wells")) c.wells.push_back(read_well(w));
    {
        std::set<std::string> names;
        for (const auto& w : c.wells)
            if (!names.insert(w.name).second) r.fail("wells", "duplicate well name '" + w.name + "'");
    }

    if (r.has("solver")) {
        const Reader s = r.object("solver");
        auto& n = c.solver.newton;
        n.tolerance = s.positive("newton_tolerance", n.tolerance);
        n.max_iterations = s.integer("max_newton_iterations", n.max_iterations);
        n.max_pressure_change = s.positive("max_pressure_change_ratio", n.max_pressure_change);
        n.max_saturation_change = s.positive("max_saturation_change", n.max_saturation_change);
        n.max_temperature_change = s.positive("max_temperature_change_K", n.max_temperature_change);
        n.max_active_set_changes = s.integer("max_active_set_changes", n.max_active_set_changes);
        n.linear.tolerance = s.positive("gmres_tolerance", n.linear.tolerance);
        n.linear.restart = s.integer("gmres_restart", n.linear.restart);
        n.linear.max_iterations = s.integer("gmres_max_iterations", n.linear.max_iterations);
        const std::string pc = s.string("preconditioner", "cpr");
        if (pc == "cpr")
            n.linear.preconditioner = Preconditioner::Cpr;
        else if (pc == "ilu0")
            n.linear.preconditioner = Preconditioner::Ilu0;
        else if (pc == "none")
            n.linear.preconditioner = Preconditioner::None;
        else
            s.fail("preconditioner", "expected 'cpr', 'ilu0' or 'none'");
        n.linear.decouple = s.boolean("cpr_decouple", n.linear.decouple);
        n.linear.pressure_tolerance = s.positive("cpr_pressure_tolerance", n.linear.pressure_tolerance);
        n.linear.pressure_iterations = s.integer("cpr_pressure_iterations", n.linear.pressure_iterations);
        s.finish();
        try {
            c.solver.validate();
        } catch (const ConfigError& e) {
            s.fail(e.what());
        }
    }

    for (const Reader& s : r.objects("stages")) {
        StageConfig st;
        st.name = s.string("name", "stage" + std::to_string(c.stages.size() + 1));
        st.until_stationary = s.boolean("until_stationary", false);
        st.duration = s.positive("duration_s");
        st.stationarity_tolerance = s.positive("stationarity_tolerance_per_year", st.stationarity_tolerance);
        if (s.has("dirichlet"))
            for (const Reader& d : s.objects("dirichlet")) st.dirichlet.push_back(read_dirichlet(d));
        if (s.has("open_wells")) st.open_wells = s.strings("open_wells");
        for (const auto& name : st.open_wells) {
            bool found = false;
            for (const auto& w : c.wells) found = found || w.name == name;
            if (!found) s.fail("open_wells", "unknown well '" + name + "'");
        }
        if (s.has("time_step")) st.time = read_time_step(s.object("time_step"), st.time);
        s.finish();
        c.stages.push_back(st);
    }
    if (c.stages.empty()) r.fail("stages", "at least one stage is required");

    if (r.has("output")) {
        const Reader o = r.object("output");
        c.output.directory = o.string("directory", c.output.directory.string());
        c.output.vtk_every_steps = o.integer("vtk_every_steps", 0);
        c.output.node_fields = o.boolean("node_fields", false);
        c.output.checkpoint_every_steps = o.integer("checkpoint_every_steps", 0);
        c.output.profile_every_steps = o.integer("profile_every_steps", 0);
        o.finish();
    }
    r.finish();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string format_config(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    if (!c.mesh.file.empty())
        j["mesh"] = {{"file", c.mesh.file.string()}};
    else
        j["mesh"] = {{"cartesian",
                      {{"cells", c.mesh.cells},
                       {"min_m", {c.mesh.box.min.x(), c.mesh.box.min.y(), c.mesh.box.min.z()}},
                       {"max_m", {c.mesh.box.max.x(), c.mesh.box.max.y(), c.mesh.box.max.z()}}}}};
    json rock = {{"matrix", rock_props_json(c.rock.matrix)}};
    const json frac = rock_props_json(c.rock.fracture);
    if (!frac.empty()) rock["fracture"] = frac;
    for (const auto& reg : c.rock.regions) {
        json g = rock_props_json(reg.props);
        g["min_m"] = {reg.box.min.x(), reg.box.min.y(), reg.box.min.z()};
        g["max_m"] = {reg.box.max.x(), reg.box.max.y(), reg.box.max.z()};
        rock["regions"].push_back(g);
    }
    rock["relperm_exponents"] = {{"matrix_liquid", c.rock.matrix_relperm_exponent[0]},
                                 {"matrix_gas", c.rock.matrix_relperm_exponent[1]},
                                 {"fracture_liquid", c.rock.fracture_relperm_exponent[0]},
                                 {"fracture_gas", c.rock.fracture_relperm_exponent[1]}};
    j["rock"] = rock;
    j["fluid"] = {{"eos", eos_json(c.eos)},
                  {"liquid_conductivity_W_per_m_K", c.fluid_conductivity.liquid},
                  {"gas_conductivity_W_per_m_K", c.fluid_conductivity.gas}};
    j["gravity_m_per_s2"] = {c.gravity.x(), c.gravity.y(), c.gravity.z()};
    j["volume_fractions"] = {{"matrix", c.fractions.omega}, {"fracture", c.fractions.omega_f}};
    j["residual_scaling"] = {{"density_kg_per_m3", c.scaling.density},
                             {"internal_energy_J_per_kg", c.scaling.internal_energy},
                             {"temperature_K", c.scaling.temperature},
                             {"volume_floor_ratio", c.scaling.volume_floor_ratio}};
    json init = {{"type", "hydrostatic"}, {"pressure_Pa", c.initial.pressure}, {"reference_z_m", c.initial.reference_z}};
    if (c.initial.temperature) init["temperature_K"] = *c.initial.temperature;
    if (c.initial.saturation_offset) init["saturation_offset_K"] = *c.initial.saturation_offset;
    j["initial"] = init;
    j["wells"] = json::array();
    for (const auto& w : c.wells) j["wells"].push_back(well_json(w));
    const auto& n = c.solver.newton;
    const char* pc = n.linear.preconditioner == Preconditioner::Cpr    ? "cpr"
                     : n.linear.preconditioner == Preconditioner::Ilu0 ? "ilu0"
                                                                       : "none";
    j["solver"] = {{"newton_tolerance", n.tolerance},
                   {"max_newton_iterations", n.max_iterations},
                   {"max_pressure_change_ratio", n.max_pressure_change},
                   {"max_saturation_change", n.max_saturation_change},
                   {"max_temperature_change_K", n.max_temperature_change},
                   {"max_active_set_changes", n.max_active_set_changes},
                   {"gmres_tolerance", n.linear.tolerance},
                   {"gmres_restart", n.linear.restart},
                   {"gmres_max_iterations", n.linear.max_iterations},
                   {"preconditioner", pc},
                   {"cpr_decouple", n.linear.decouple},
                   {"cpr_pressure_tolerance", n.linear.pressure_tolerance},
                   {"cpr_pressure_iterations", n.linear.pressure_iterations}};
    j["stages"] = json::array();
    for (const auto& s : c.stages) {
        json st = {{"name", s.name},
                   {"duration_s", s.duration},
                   {"until_stationary", s.until_stationary},
                   {"stationarity_tolerance_per_year", s.stationarity_tolerance},
                   {"open_wells", s.open_wells},
                   {"time_step", time_step_json(s.time)}};
        st["dirichlet"] = json::array();
        for (const auto& d : s.dirichlet) st["dirichlet"].push_back(dirichlet_json(d));
        j["stages"].push_back(st);
    }
    j["output"] = {{"directory", c.output.directory.string()},
                   {"vtk_every_steps", c.output.vtk_every_steps},
                   {"node_fields", c.output.node_fields},
                   {"checkpoint_every_steps", c.output.checkpoint_every_steps},
                   {"profile_every_steps", c.output.profile_every_steps}};
    return j.dump(2) + "\n";
}

ScenarioConfig builtin_case41(int level) {
    if (level < 1 || level > 4) throw ConfigError("case41: level must be 1, 2, 3 or 4");
    const int f = 1 << (level - 1);
    ScenarioConfig c;
    c.name = "case41_h" + std::to_string(level);
    c.mesh.cells = {10 * f, 10 * f, 5 * f};
    c.mesh.box = {Vec3(-1000.0, -1000.0, 0.0), Vec3(1000.0, 1000.0, 200.0)};
    c.rock.matrix.permeability = 5e-14 * Eigen::Matrix3d::Identity();
    c.rock.matrix.porosity = 0.15;
    c.rock.matrix.conductivity = 2.0;
    c.rock.matrix.heat_capacity = 1.6e6;
    c.gravity = Vec3(0.0, 0.0, -9.81);
    c.initial.pressure = 4e6;
    c.initial.reference_z = 200.0;
    c.initial.saturation_offset = -1.0;

    WellConfig w;
    w.name = "producer";
    w.kind = WellKind::Production;
    w.radius = 0.1;
    w.vertical_line = std::array<double, 2>{0.0, 0.0};
    w.p_limit = 1e5;
    w.q_limit = 200.0 / 3.6;
    c.wells.push_back(w);

    const FluidEos eos(c.eos);
    StageConfig s1;
    s1.name = "equilibration";
    s1.until_stationary = true;
    s1.duration = 1e4 * 365.25 * 86400.0;
    s1.stationarity_tolerance = 1e-6;
    DirichletConfig top;
    top.tags = {"zmax"};
    top.pressure = 4e6;
    top.temperature = eos.t_sat(4e6) - 1.0;
    s1.dirichlet.push_back(top);
    s1.time.initial = 86400.0;
    s1.time.max = 100.0 * 365.25 * 86400.0;
    s1.time.min = 1.0;

    StageConfig s2;
    s2.name = "production";
    s2.duration = 30.0 * 86400.0;
    DirichletConfig sides;
    sides.tags = {"xmin", "xmax", "ymin", "ymax"};
    sides.freeze = true;
    s2.dirichlet.push_back(sides);
    s2.open_wells = {"producer"};
    s2.time.initial = 600.0;
    s2.time.max = 0.25 * 86400.0;
    s2.time.min = 1e-3;
    c.stages = {s1, s2};
    c.output.directory = c.name;
    return c;
}

}  // namespace geovag
