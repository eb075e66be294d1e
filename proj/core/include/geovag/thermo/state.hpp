#pragma once

#include <cstdint>
#include <string_view>

#include "geovag/thermo/eos.hpp"

namespace geovag {

/// Phase-presence context of a degree of freedom (active set of the closure).
enum class PhaseContext : std::uint8_t { Liquid = 0, Gas = 1, TwoPhase = 2 };

std::string_view to_string(PhaseContext c);
PhaseContext context_from_string(std::string_view s);

/// Physical unknowns (p, T, s^l, s^g, c^l, c^g) of one control volume.
struct DofState {
    double p = 0.0;   // Pa
    double T = 0.0;   // K
    double sl = 1.0;
    double sg = 0.0;
    double cl = 1.0;
    double cg = 0.0;
    PhaseContext context = PhaseContext::Liquid;

    double saturation(Phase a) const { return a == Phase::Liquid ? sl : sg; }
    double mass_fraction(Phase a) const { return a == Phase::Liquid ? cl : cg; }

    /// Second primary unknown: T for single-phase contexts, s^g for two-phase.
    double second_primary() const { return context == PhaseContext::TwoPhase ? sg : T; }
    void set_second_primary(double v) {
        if (context == PhaseContext::TwoPhase)
            sg = v;
        else
            T = v;
    }
};

struct ClosureResiduals {
    double r1 = 0.0;  // c^g p - p_sat(T) c^l
    double r2 = 0.0;  // min(s^l, 1 - c^l)
    double r3 = 0.0;  // min(s^g, 1 - c^g)
    double r4 = 0.0;  // s^l + s^g - 1
};

ClosureResiduals closure_residuals(const DofState& x, const FluidEos& eos);

/// Fills the secondary unknowns from (p, second primary) according to the
/// context: two-phase T = T_sat(p), c = 1; liquid c^g = p_sat(T)/p;
/// gas c^l = p/p_sat(T).
void complete_state(DofState& x, const FluidEos& eos);

/// Context for a state with no history. Ties p == p_sat(T) select two-phase.
PhaseContext classify_fresh(double p, double T, const FluidEos& eos);

/// Newton-min switch of the phase context after an update. Phase appears when
/// the inactive branch of min(s, 1 - c) becomes negative; it disappears when
/// its saturation leaves [0, 1]. On exact ties the current context is kept.
/// Returns true if the context changed (the state is completed again).
bool update_context(DofState& x, const FluidEos& eos);

}  // namespace geovag
