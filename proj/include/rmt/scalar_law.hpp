// Scalar self-consistent law for the Hermitised model and its
// quaternion-valued extensions.
//
// m = m_z(w) is the unique solution of
//
//     -1/m = m + w - |z|^2 / (m + w),        Im w * Im m > 0,
//
// equivalently the root of the cubic m^3 + 2w m^2 + (w^2 - |z|^2 + 1) m + w.
// The full deterministic approximation of the Hermitised resolvent is the
// algebra element M_z(w) = m E+ - z u F - conj(z) u F~ with u = m/(m+w).

#pragma once

#include <vector>

#include "rmt/quat.hpp"

namespace rmt {

// Root of the cubic on the physical branch, polished by Newton iteration.
// Requires Im w != 0.  The residual of the defining equation at the
// returned value is below 1e-12 throughout the bulk.
cd solve_m(cd w, cd z);

inline cd stability_u(cd w, cd z) {
    const cd m = solve_m(w, z);
    return m / (m + w);
}

// M_z(w) as an algebra element.
Quat m_quat(cd w, cd z);

// Derivative m'(w) by implicit differentiation of the cubic.
cd m_prime(cd w, cd z);

// Upper bound scale for |m'|: 1 / (|1 - |z|^2| + |Im w|^{2/3}).
double m_prime_bound(cd w, cd z);

// Deterministic approximation hat-M built from an observed trace value
// tr_g = <G_z(w)>: hat-u = 1/(|z|^2 - (tr_g + w)^2), hat-m = (tr_g + w) hat-u.
Quat mhat_quat(cd w, cd z, cd tr_g);

// Residual |1/m + m + w - |z|^2/(m+w)| of the defining equation.
double law_residual(cd m, cd w, cd z);

// Logarithmically spaced eta grid [eta_min, eta_max], n points.
std::vector<double> eta_grid(double eta_min, double eta_max, int n);

}  // namespace rmt
