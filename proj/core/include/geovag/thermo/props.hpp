#pragma once

#include <array>
#include <type_traits>

#include "geovag/dual.hpp"
#include "geovag/thermo/eos.hpp"
#include "geovag/thermo/relperm.hpp"
#include "geovag/thermo/state.hpp"

namespace geovag {

template <class S>
struct PhaseProps {
    S saturation{0.0};
    S fraction{0.0};  // c^alpha
    S density{0.0};
    S viscosity{1.0};
    S enthalpy{0.0};
    S internal_energy{0.0};
    S rel_perm{0.0};
    /// c rho k_r / mu: mass mobility without the stencil transmissibility.
    S mobility{0.0};
};

template <class S>
struct DofProps {
    S p{0.0};
    S T{0.0};
    std::array<PhaseProps<S>, kNumPhases> phase;
};

/// Properties of one dof as functions of its primary unknowns (p, second).
/// With S = Dual<N>, p is seeded at index seed_p and the second primary at
/// seed_x; a negative seed leaves the variable passive.
template <class S>
DofProps<S> evaluate_props(const DofState& x, const FluidEos& eos, const RelPermSet& rock, int seed_p = 0,
                           int seed_x = 1) {
    auto var = [](double v, int seed) {
        if constexpr (std::is_same_v<S, double>) {
            (void)seed;
            return v;
        } else {
            return seed >= 0 ? S(v, seed) : S(v);
        }
    };
    DofProps<S> r;
    r.p = var(x.p, seed_p);
    S sg{0.0};
    switch (x.context) {
        case PhaseContext::TwoPhase:
            if constexpr (std::is_same_v<S, double>)
                r.T = eos.t_sat(x.p);
            else
                r.T = eos.t_sat(r.p);
            sg = var(x.sg, seed_x);
            r.phase[0].fraction = S(1.0);
            r.phase[1].fraction = S(1.0);
            break;
        case PhaseContext::Liquid:
            r.T = var(x.T, seed_x);
            sg = S(0.0);
            r.phase[0].fraction = S(1.0);
            r.phase[1].fraction = eos.p_sat_unchecked(r.T) / r.p;
            break;
        case PhaseContext::Gas:
            r.T = var(x.T, seed_x);
            sg = S(1.0);
            r.phase[0].fraction = r.p / eos.p_sat_unchecked(r.T);
            r.phase[1].fraction = S(1.0);
            break;
    }
    r.phase[0].saturation = 1.0 - sg;
    r.phase[1].saturation = sg;
    for (int a = 0; a < kNumPhases; ++a) {
        const Phase ph = static_cast<Phase>(a);
        auto& P = r.phase[a];
        P.density = eos.density(ph, r.p, r.T);
        P.viscosity = eos.viscosity(ph, r.p, r.T);
        P.enthalpy = eos.enthalpy(ph, r.p, r.T);
        P.internal_energy = P.enthalpy - r.p / P.density;
        P.rel_perm = rel_perm(rock, ph, P.saturation);
        P.mobility = P.fraction * P.density * P.rel_perm / P.viscosity;
    }
    return r;
}

}  // namespace geovag
