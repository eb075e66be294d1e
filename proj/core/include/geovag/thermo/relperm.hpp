#pragma once

#include <algorithm>
#include <cassert>

#include "geovag/dual.hpp"
#include "geovag/thermo/eos.hpp"

namespace geovag {

/// Power law k_r(s) = s^exponent.
struct RelPermLaw {
    double exponent = 2.0;

    template <class S>
    S operator()(const S& s) const {
        using std::pow;
        assert(value(s) >= -1e-12 && value(s) <= 1.0 + 1e-12);
        if (value(s) <= 0.0) return S(0.0);
        if (value(s) >= 1.0) return S(1.0);
        if (exponent == 2.0) return s * s;
        return pow(s, exponent);
    }
};

/// Relative permeability laws of one rocktype.
struct RelPermSet {
    RelPermLaw liquid;
    RelPermLaw gas;

    const RelPermLaw& operator[](Phase a) const { return a == Phase::Liquid ? liquid : gas; }
};

template <class S>
S rel_perm(const RelPermSet& rock, Phase a, const S& s) {
    return rock[a](s);
}

}  // namespace geovag
