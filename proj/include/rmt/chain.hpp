// Resolvent chain specification: spectral parameters w_1..w_m and the
// interior deformations B_1..B_{m-1} between consecutive resolvents.  The
// closing deformation B_m (for trace chains) is passed separately by the
// operations that need it.

#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "rmt/quat.hpp"

namespace rmt {

inline bool is_f_type(const Quat& b) {
    // Counts as "regular" if it is F or F~ (the off-diagonal basis elements).
    return (b.f != cd(0.0) || b.fs != cd(0.0)) && b.ep == cd(0.0) && b.em == cd(0.0);
}

struct ChainSpec {
    std::vector<cd> w;    // m >= 1 spectral parameters, Im w_j != 0
    std::vector<Quat> B;  // m-1 interior deformations

    int m() const { return int(w.size()); }

    double eta() const {
        double e = std::numeric_limits<double>::infinity();
        for (cd wj : w) e = std::min(e, std::abs(wj.imag()));
        return e;
    }

    // Number of regular deformations among the interior B's plus an
    // optional closing one.
    int a_count(const Quat* closing = nullptr) const {
        int a = 0;
        for (const auto& b : B) a += is_f_type(b) ? 1 : 0;
        if (closing && is_f_type(*closing)) ++a;
        return a;
    }

    void validate() const;

    // Textual form "w=0.1+0.5i; B=F; w=-0.2-0.3i; ...", ending with a w.
    static ChainSpec parse(const std::string& text);
    std::string str() const;
};

// "re", "re+imi" / "re-imi" (with "+i"/"-i" shorthands) -> complex.
cd parse_complex(const std::string& tok);

// Basis shorthands E+, E-, F, F~ or a general algebra element via parse_quat.
Quat parse_deformation(const std::string& tok);

}  // namespace rmt
