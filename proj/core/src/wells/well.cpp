#include "geovag/wells/well.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "geovag/error.hpp"
#include "geovag/thermo/flash.hpp"

namespace geovag {

std::string_view to_string(WellKind k) { return k == WellKind::Injection ? "injection" : "production"; }
std::string_view to_string(WellMode m) { return m == WellMode::Rate ? "rate" : "bhp"; }

double Well::rate_scale() const { return std::max(std::abs(q_limit), 1e-6); }
double Well::pressure_scale() const { return std::max(std::abs(p_limit), 1e5); }

double peaceman_edge_index(double k, double length, double dx, double dy, double radius) {
    const double r_eq = 0.14 * std::sqrt(dx * dx + dy * dy);
    if (!(r_eq > radius)) {
        std::ostringstream os;
        os << "Peaceman radius " << r_eq << " m does not exceed the well radius " << radius << " m";
        throw ConfigError(os.str());
    }
    return 2.0 * std::numbers::pi * k * length / std::log(r_eq / radius);
}

std::vector<double> peaceman_index(const DfmMesh& mesh, const WellGeometry& well,
                                   const std::vector<Eigen::Matrix3d>& perm) {
    std::vector<double> wi(well.size(), 0.0);
    for (std::size_t i = 1; i < well.size(); ++i) {
        const int a = well.nodes[well.parent[i]], b = well.nodes[i];
        double dx = 0.0, dy = 0.0, k = 0.0;
        int hosts = 0;
        const auto cb = mesh.node_cells(b);
        for (int c : mesh.node_cells(a)) {
            if (std::find(cb.begin(), cb.end(), c) == cb.end()) continue;
            Vec3 lo = mesh.nodes()[mesh.cells()[c].nodes[0]], hi = lo;
            for (int s : mesh.cells()[c].nodes) {
                lo = lo.cwiseMin(mesh.nodes()[s]);
                hi = hi.cwiseMax(mesh.nodes()[s]);
            }
            dx += hi.x() - lo.x();
            dy += hi.y() - lo.y();
            k += std::sqrt(perm[c](0, 0) * perm[c](1, 1));
            ++hosts;
        }
        if (hosts == 0) throw GeometryError("well '" + well.name + "': edge without host cell");
        const double e = peaceman_edge_index(k / hosts, well.edge_length[i], dx / hosts, dy / hosts, well.radius);
        wi[i] += 0.5 * e;
        wi[well.parent[i]] += 0.5 * e;
    }
    return wi;
}

template <class S>
DofProps<S> injection_fluid(const Well& well, const FluidEos& eos, const S& p) {
    double T = 0.0;
    if (!eos.solve_enthalpy(Phase::Liquid, value(p), well.injection_enthalpy, T)) {
        std::ostringstream os;
        os << "well '" << well.geometry.name << "': no liquid temperature for enthalpy " << well.injection_enthalpy
           << " J/kg";
        throw WellModelError(os.str());
    }
    DofState x;
    x.p = value(p);
    x.T = T;
    x.context = PhaseContext::Liquid;
    DofProps<S> r = evaluate_props<S>(x, eos, RelPermSet{}, -1, -1);
    if constexpr (!std::is_same_v<S, double>) {
        // T(p) from h(p, T) = const
        const Dual<2> hp = eos.enthalpy(Phase::Liquid, Dual<2>(x.p, 0), Dual<2>(T, 1));
        const double dTdp = -hp.d[0] / hp.d[1];
        S Ts = S(T);
        for (std::size_t i = 0; i < Ts.d.size(); ++i) Ts.d[i] = dTdp * p.d[i];
        r.p = p;
        r.T = Ts;
        for (int a = 0; a < kNumPhases; ++a) {
            const Phase ph = static_cast<Phase>(a);
            auto& P = r.phase[a];
            P.density = eos.density(ph, r.p, r.T);
            P.viscosity = eos.viscosity(ph, r.p, r.T);
            P.enthalpy = eos.enthalpy(ph, r.p, r.T);
            P.internal_energy = P.enthalpy - r.p / P.density;
        }
    }
    return r;
}

template DofProps<double> injection_fluid(const Well&, const FluidEos&, const double&);
template DofProps<Dual<1>> injection_fluid(const Well&, const FluidEos&, const Dual<1>&);
template DofProps<Dual<2>> injection_fluid(const Well&, const FluidEos&, const Dual<2>&);
template DofProps<Dual<3>> injection_fluid(const Well&, const FluidEos&, const Dual<3>&);

namespace {

// p_child from p_parent along one edge, with density given as a function of pressure.
template <class Rho>
double march_edge(double p_parent, double dz, double gravity, const HydrostaticOptions& opt, double p_predict,
                  Rho&& rho) {
    double p = p_parent + rho(p_predict) * gravity * dz;
    if (opt.iterate) {
        for (int it = 0; it < 100; ++it) {
            const double next = p_parent + rho(0.5 * (p_parent + p)) * gravity * dz;
            const bool done = std::abs(next - p) <= opt.tolerance * std::abs(next);
            p = next;
            if (done) break;
        }
    } else {
        for (int it = 0; it < opt.corrections; ++it) p = p_parent + rho(0.5 * (p_parent + p)) * gravity * dz;
    }
    return p;
}

void resize(WellTrace& t, std::size_t n) {
    t.dp.assign(n, 0.0);
    t.p.assign(n, 0.0);
    t.T.assign(n, 0.0);
    t.sl.assign(n, 1.0);
    t.sg.assign(n, 0.0);
    t.Q_mass.assign(n, 0.0);
    t.Q_energy.assign(n, 0.0);
}

}  // namespace

WellTrace injection_pressure_drop(const Well& well, const FluidEos& eos, double gravity, double p_root_prev) {
    const auto& g = well.geometry;
    WellTrace t;
    resize(t, g.size());
    t.p_root = p_root_prev;
    auto rho = [&](double p) {
        const auto f = injection_fluid<double>(well, eos, p);
        return f.phase[0].density;
    };
    t.p[0] = p_root_prev;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const int par = g.parent[i];
        t.p[i] = march_edge(t.p[par], g.z[par] - g.z[i], gravity, well.hydrostatics, t.p[par], rho);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        t.dp[i] = t.p[i] - p_root_prev;
        t.T[i] = injection_fluid<double>(well, eos, t.p[i]).T;
    }
    return t;
}

WellTrace production_pressure_drop(const Well& well, const FluidEos& eos, const RelPermSet& rock, double gravity,
                                   const std::vector<DofState>& reservoir, double p_root_prev,
                                   const std::vector<double>& dp_prev) {
    const auto& g = well.geometry;
    const std::size_t n = g.size();
    WellTrace t;
    resize(t, n);
    t.p_root = p_root_prev;

    std::vector<double> p_old(n);
    for (std::size_t i = 0; i < n; ++i) {
        p_old[i] = p_root_prev + dp_prev[i];
        const auto props = evaluate_props<double>(reservoir[i], eos, rock);
        const auto q = coupling_flux<double>(well, static_cast<int>(i), props, p_old[i], eos);
        t.Q_mass[i] = q.mass;
        t.Q_energy[i] = q.energy;
    }
    for (std::size_t i = n; i-- > 1;) {
        t.Q_mass[g.parent[i]] += t.Q_mass[i];
        t.Q_energy[g.parent[i]] += t.Q_energy[i];
    }

    // mixture density of the fluid flowing up through node i at pressure p
    std::vector<char> stagnant(n, 0);
    std::vector<double> stagnant_rho(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (t.Q_mass[i] < 0.0) {
            std::ostringstream os;
            os << "well '" << g.name << "': negative subtree mass rate at node " << g.nodes[i]
               << " (cross flow unsupported)";
            throw CrossFlowError(os.str());
        }
        if (t.Q_mass[i] == 0.0) {
            stagnant[i] = 1;
            const auto props = evaluate_props<double>(reservoir[i], eos, rock);
            stagnant_rho[i] = props.phase[0].saturation * props.phase[0].density +
                              props.phase[1].saturation * props.phase[1].density;
            t.T[i] = props.T;
            t.sl[i] = props.phase[0].saturation;
            t.sg[i] = props.phase[1].saturation;
        } else {
            const auto f = flash_p_qm_qe(eos, p_old[i], t.Q_mass[i], t.Q_energy[i]);
            t.T[i] = f.T;
            t.sl[i] = f.sl;
            t.sg[i] = f.sg;
        }
    }
    auto mixture = [&](std::size_t i) {
        return [&, i](double p) {
            if (stagnant[i]) return stagnant_rho[i];
            const auto f = flash_p_qm_qe(eos, p, t.Q_mass[i], t.Q_energy[i]);
            return f.sl * eos.density(Phase::Liquid, p, f.T) + f.sg * eos.density(Phase::Gas, p, f.T);
        };
    };
    t.p[0] = p_root_prev;
    for (std::size_t i = 1; i < n; ++i) {
        const int par = g.parent[i];
        HydrostaticOptions opt = well.hydrostatics;
        if (stagnant[i]) opt.corrections = 0, opt.iterate = false;
        t.p[i] = march_edge(t.p[par], g.z[par] - g.z[i], gravity, opt, p_old[i], mixture(i));
    }
    for (std::size_t i = 0; i < n; ++i) t.dp[i] = t.p[i] - p_root_prev;
    return t;
}

WellTrace stagnant_pressure_drop(const Well& well, const FluidEos& eos, const RelPermSet& rock, double gravity,
                                 const std::vector<DofState>& reservoir, double p_root) {
    if (well.kind == WellKind::Injection) return injection_pressure_drop(well, eos, gravity, p_root);
    const auto& g = well.geometry;
    WellTrace t;
    resize(t, g.size());
    t.p_root = p_root;
    std::vector<double> rho(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto props = evaluate_props<double>(reservoir[i], eos, rock);
        rho[i] = props.phase[0].saturation * props.phase[0].density + props.phase[1].saturation * props.phase[1].density;
        t.T[i] = props.T;
        t.sl[i] = props.phase[0].saturation;
        t.sg[i] = props.phase[1].saturation;
    }
    t.p[0] = p_root;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const int par = g.parent[i];
        t.p[i] = t.p[par] + rho[i] * gravity * (g.z[par] - g.z[i]);
    }
    for (std::size_t i = 0; i < g.size(); ++i) t.dp[i] = t.p[i] - p_root;
    return t;
}

WellBranches well_branches(const Well& well, double total_rate, double p_bhp) {
    WellBranches b;
    if (well.kind == WellKind::Production) {
        b.rate = (well.q_limit - total_rate) / well.rate_scale();
        b.bhp = (p_bhp - well.p_limit) / well.pressure_scale();
    } else {
        b.rate = (total_rate - well.q_limit) / well.rate_scale();
        b.bhp = (well.p_limit - p_bhp) / well.pressure_scale();
    }
    return b;
}

double well_residual(const Well& well, double total_rate, double p_bhp) {
    const auto b = well_branches(well, total_rate, p_bhp);
    const double m = std::min(b.rate, b.bhp);
    return well.kind == WellKind::Production ? m : -m;
}

WellMode select_mode(const WellBranches& b, const WellMode* current) {
    if (b.rate < b.bhp) return WellMode::Rate;
    if (b.bhp < b.rate) return WellMode::Bhp;
    return current ? *current : WellMode::Bhp;
}

double well_gas_volume(const Well& well, const WellTrace& trace) {
    const double area = std::numbers::pi * well.geometry.radius * well.geometry.radius;
    double v = 0.0;
    for (std::size_t i = 0; i < well.geometry.size(); ++i) v += trace.sg[i] * area * well.geometry.node_length(static_cast<int>(i));
    return v;
}

}  // namespace geovag
