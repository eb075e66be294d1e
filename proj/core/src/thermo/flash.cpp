#include "geovag/thermo/flash.hpp"

#include <sstream>

#include "geovag/error.hpp"

namespace geovag {

FlashResult flash_p_qm_qe(const FluidEos& eos, double p, double q_mass, double q_energy) {
    if (!(q_mass > 0.0)) {
        std::ostringstream os;
        os << "flash requires a positive mass rate, got " << q_mass;
        throw FlashError(os.str());
    }
    const double h = q_energy / q_mass;
    double tsat = 0.0;
    try {
        tsat = eos.t_sat(p);
    } catch (const DomainError& e) {
        throw FlashError(std::string("flash: ") + e.what());
    }
    const double hl = eos.enthalpy(Phase::Liquid, p, tsat);
    const double hg = eos.enthalpy(Phase::Gas, p, tsat);
    const double cl = (hg - h) / (hg - hl);

    FlashResult r;
    if (cl > 0.0 && cl < 1.0) {
        const double vl = cl / eos.density(Phase::Liquid, p, tsat);
        const double vg = (1.0 - cl) / eos.density(Phase::Gas, p, tsat);
        r.T = tsat;
        r.cl = cl;
        r.sl = vl / (vl + vg);
        r.sg = 1.0 - r.sl;
        r.state = PhaseContext::TwoPhase;
        return r;
    }
    const Phase phase = cl >= 1.0 ? Phase::Liquid : Phase::Gas;
    double T = 0.0;
    if (!eos.solve_enthalpy(phase, p, h, T)) {
        std::ostringstream os;
        os << "flash: no " << (phase == Phase::Liquid ? "liquid" : "gas") << " temperature with enthalpy " << h
           << " J/kg at p = " << p << " Pa";
        throw FlashError(os.str());
    }
    r.T = T;
    if (phase == Phase::Liquid) {
        r.cl = 1.0;
        r.sl = 1.0;
        r.sg = 0.0;
        r.state = PhaseContext::Liquid;
    } else {
        r.cl = 0.0;
        r.sl = 0.0;
        r.sg = 1.0;
        r.state = PhaseContext::Gas;
    }
    return r;
}

}  // namespace geovag
