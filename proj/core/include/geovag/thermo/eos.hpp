#pragma once

#include <cmath>

#include "geovag/dual.hpp"

namespace geovag {

enum class Phase : int { Liquid = 0, Gas = 1 };
inline constexpr int kNumPhases = 2;

/// Coefficients of the analytic water/steam property laws.
///
/// Liquid density is weakly compressible and quadratic in temperature around
/// (p_ref, t_ref); gas density is ideal with a linear virial correction.
/// Liquid enthalpy is affine in T and the gas enthalpy adds the latent heat
/// obtained from the Clausius-Clapeyron relation applied to the saturation
/// curve, L(T) = (R/M) (psat_b - psat_c T), so that h^g - h^l on the
/// saturation line is consistent with p_sat. Internal energies are always
/// e = h - p / rho.
struct EosParams {
    // p_sat(T) = psat_scale * exp(psat_a - psat_b / T - psat_c * ln T)  [Pa]
    double psat_scale = 100.0;
    double psat_a = 46.784;
    double psat_b = 6435.0;
    double psat_c = 3.868;
    double t_min = 274.0;  // K
    double t_max = 647.0;  // K

    double molar_mass = 0.018015;       // kg/mol
    double gas_constant = 8.314462618;  // J/(mol K)

    double liquid_density_ref = 998.0;      // kg/m3 at (p_ref, t_ref)
    double p_ref = 1.0e5;                   // Pa
    double t_ref = 293.15;                  // K
    double liquid_compressibility = 4.5e-10;  // 1/Pa
    double liquid_expansion = 3.066e-4;       // 1/K
    double liquid_expansion2 = 2.417e-6;      // 1/K^2
    double gas_virial = 2.75e-5;              // K/Pa, rho_g = pM/(RT) (1 + gas_virial p / T)

    double liquid_heat_capacity = 4200.0;  // J/(kg K)
    double enthalpy_t0 = 273.15;           // K, h^l(t0) = 0

    // mu_l = a * 10^(b / (T - c))
    double liquid_visc_a = 2.414e-5;
    double liquid_visc_b = 247.8;
    double liquid_visc_c = 140.0;
    // mu_g = mu0 + slope (T - t0)
    double gas_visc_ref = 8.85e-6;
    double gas_visc_slope = 3.53e-8;
    double gas_visc_t0 = 273.15;

    /// Throws ConfigError if a coefficient makes a law non-physical on [t_min, t_max].
    void validate() const;
};

/// Water/steam property laws. All templates accept double or Dual<N>.
class FluidEos {
public:
    FluidEos() = default;
    explicit FluidEos(const EosParams& params);

    const EosParams& params() const { return params_; }

    template <class S>
    S p_sat_unchecked(const S& T) const {
        using std::exp;
        using std::log;
        return params_.psat_scale * exp(params_.psat_a - params_.psat_b / T - params_.psat_c * log(T));
    }

    /// Saturated vapour pressure in Pa; throws DomainError outside [t_min, t_max].
    double p_sat(double T) const;
    double dp_sat_dT(double T) const;

    /// Inverse of p_sat by safeguarded Newton/bisection, 1e-12 relative.
    double t_sat(double p) const;
    template <int N>
    Dual<N> t_sat(const Dual<N>& p) const {
        const double T = t_sat(p.v);
        Dual<N> r(T);
        const double inv = 1.0 / dp_sat_dT(T);
        for (int i = 0; i < N; ++i) r.d[i] = p.d[i] * inv;
        return r;
    }

    double p_sat_min() const { return p_sat_unchecked(params_.t_min); }
    double p_sat_max() const { return p_sat_unchecked(params_.t_max); }

    template <class S>
    S density(Phase phase, const S& p, const S& T) const {
        const auto& c = params_;
        if (phase == Phase::Liquid) {
            const S dT = T - c.t_ref;
            return c.liquid_density_ref *
                   (1.0 + c.liquid_compressibility * (p - c.p_ref) - c.liquid_expansion * dT -
                    c.liquid_expansion2 * dT * dT);
        }
        const double m_over_r = c.molar_mass / c.gas_constant;
        return m_over_r * p / T * (1.0 + c.gas_virial * p / T);
    }

    template <class S>
    S viscosity(Phase phase, const S& /*p*/, const S& T) const {
        const auto& c = params_;
        if (phase == Phase::Liquid) {
            using std::exp;
            return c.liquid_visc_a * exp(std::log(10.0) * c.liquid_visc_b / (T - c.liquid_visc_c));
        }
        return c.gas_visc_ref + c.gas_visc_slope * (T - c.gas_visc_t0);
    }

    template <class S>
    S latent_heat(const S& T) const {
        const auto& c = params_;
        return c.gas_constant / c.molar_mass * (c.psat_b - c.psat_c * T);
    }

    template <class S>
    S enthalpy(Phase phase, const S& /*p*/, const S& T) const {
        const S hl = params_.liquid_heat_capacity * (T - params_.enthalpy_t0);
        if (phase == Phase::Liquid) return hl;
        return hl + latent_heat(T);
    }

    template <class S>
    S internal_energy(Phase phase, const S& p, const S& T) const {
        return enthalpy(phase, p, T) - p / density(phase, p, T);
    }

    /// dh/dT at fixed p (strictly positive by validate()).
    double enthalpy_dT(Phase phase, double p, double T) const;

    /// Temperature solving h^phase(p, T) = h on [t_min, t_max]; nullopt-like
    /// failure is reported through the bool.
    bool solve_enthalpy(Phase phase, double p, double h, double& T) const;

private:
    EosParams params_;
};

}  // namespace geovag
