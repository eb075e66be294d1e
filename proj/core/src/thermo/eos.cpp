#include "geovag/thermo/eos.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>

#include <cstdint>
#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

void EosParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("eos: " + what); };
    if (!(t_min > 0.0 && t_max > t_min)) fail("t_min/t_max must satisfy 0 < t_min < t_max");
    if (psat_scale <= 0.0) fail("psat_scale must be positive");
    if (psat_b - psat_c * t_max <= 0.0) fail("saturation curve must be increasing on [t_min, t_max]");
    if (molar_mass <= 0.0 || gas_constant <= 0.0) fail("molar mass and gas constant must be positive");
    if (liquid_density_ref <= 0.0) fail("liquid_density_ref must be positive");
    if (liquid_heat_capacity <= 0.0) fail("liquid_heat_capacity must be positive");
    if (liquid_heat_capacity - gas_constant / molar_mass * psat_c <= 0.0)
        fail("gas heat capacity (liquid_heat_capacity - R/M psat_c) must be positive");
    if (liquid_visc_a <= 0.0 || t_min <= liquid_visc_c) fail("liquid viscosity law invalid on range");
    if (gas_visc_ref + gas_visc_slope * (t_min - gas_visc_t0) <= 0.0) fail("gas viscosity must be positive");
    const double dT = t_max - t_ref;
    if (1.0 - liquid_expansion * dT - liquid_expansion2 * dT * dT <= 0.0)
        fail("liquid density becomes non-positive below t_max");
}

FluidEos::FluidEos(const EosParams& params) : params_(params) { params_.validate(); }

namespace {
void check_temperature(const EosParams& c, double T) {
    if (!(T >= c.t_min && T <= c.t_max)) {
        std::ostringstream os;
        os << "temperature " << T << " K outside [" << c.t_min << ", " << c.t_max << "]";
        throw DomainError(os.str());
    }
}
}  // namespace

double FluidEos::p_sat(double T) const {
    check_temperature(params_, T);
    return p_sat_unchecked(T);
}

double FluidEos::dp_sat_dT(double T) const {
    return p_sat_unchecked(T) * (params_.psat_b / (T * T) - params_.psat_c / T);
}

double FluidEos::t_sat(double p) const {
    const double lo = p_sat_min();
    const double hi = p_sat_max();
    if (!(p >= lo && p <= hi)) {
        std::ostringstream os;
        os << "pressure " << p << " Pa outside saturation range [" << lo << ", " << hi << "]";
        throw DomainError(os.str());
    }
    const auto& c = params_;
    const double target = std::log(p / c.psat_scale);
    auto f = [&](double T) {
        const double g = c.psat_a - c.psat_b / T - c.psat_c * std::log(T) - target;
        const double dg = c.psat_b / (T * T) - c.psat_c / T;
        return std::make_pair(g, dg);
    };
    // Initial guess from the linearisation 1/T ~ linear in ln p.
    const double guess = std::clamp(c.psat_b / (c.psat_a - c.psat_c * std::log(450.0) - target), c.t_min, c.t_max);
    std::uintmax_t iters = 100;
    const double T = boost::math::tools::newton_raphson_iterate(f, guess, c.t_min, c.t_max, 50, iters);
    return T;
}

double FluidEos::enthalpy_dT(Phase phase, double p, double T) const {
    const Dual<1> t(T, 0);
    return enthalpy(phase, Dual<1>(p), t).d[0];
}

bool FluidEos::solve_enthalpy(Phase phase, double p, double h, double& T) const {
    const auto& c = params_;
    const double h_lo = enthalpy(phase, p, c.t_min);
    const double h_hi = enthalpy(phase, p, c.t_max);
    if (!(h >= h_lo && h <= h_hi)) return false;
    auto f = [&](double t) {
        const Dual<1> r = enthalpy(phase, Dual<1>(p), Dual<1>(t, 0)) - h;
        return std::make_pair(r.v, r.d[0]);
    };
    const double guess = c.t_min + (h - h_lo) / (h_hi - h_lo) * (c.t_max - c.t_min);
    std::uintmax_t iters = 100;
    T = boost::math::tools::newton_raphson_iterate(f, guess, c.t_min, c.t_max, 50, iters);
    return true;
}

}  // namespace geovag
