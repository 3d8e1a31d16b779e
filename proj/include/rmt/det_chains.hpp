// Deterministic approximation M_z(w_1, B_1, ..., w_m) of resolvent chains,
// computed entirely inside the 4-dimensional algebra.
//
// The recursion, with M_i = m_quat(z, w_i) and the self-energy map
// S[R] = sum_nu nu <R E_nu> E_nu, is
//
//   M[i,j] = M_i B_i M[i+1,j] + sum_{l=i+1}^{j} M_i S[M[i,l]] M[l,j],
//
// where the l = j term contains the unknown M[i,j] inside S and is solved
// as a 4x4 complex linear system over the basis {E+, E-, F, F~}.  At j =
// i+1 this reduces to the standard two-resolvent stability equation
// M_12 = M_1 (B + S[M_12]) M_2.

#pragma once

#include <vector>

#include "rmt/chain.hpp"
#include "rmt/quat.hpp"

namespace rmt {

struct ChainM {
    Quat value;                  // M_z(w_1, B_1, ..., w_m)
    std::vector<Quat> prefixes;  // prefixes[l] = M_z(w_1, ..., w_{l+1})
    double residual = 0.0;       // fixed-point residual of the full chain
};

ChainM m_chain(cd z, const ChainSpec& spec, double tol = 1e-12);

// <M_z(w_1, B_1, ..., w_m) B_m>.
cd tr_chain_det(cd z, const ChainSpec& spec, const Quat& b_m);

// Operator norm of the chain approximation (2x2 representative).
double chain_norm_bound(cd z, const ChainSpec& spec);

// Differential equation along the characteristic flow:
//   d/dt <M_t(...) B_m> = (m/2) <M_t(...) B_m> + sum_{p<r} A_{p,r}(t),
//   A_{p,r} = sum_nu nu <M_t(w_p,B_p,...,w_r) E_nu>
//                    * <M_t(w_1,...,w_p,E_nu,w_r,...,w_m) B_m>.
// The left side is computed by central differencing of the flowed trace;
// returns the max deviation over the sampled times.
struct OdeReport {
    double max_dev = 0.0;
    std::vector<double> times;
    std::vector<double> deviations;
    bool truncated = false;  // flow left the admissible domain
};

OdeReport chain_ode_check(cd z, const ChainSpec& spec, const Quat& b_m,
                          double t_max, double dt = 1e-3);

// Right side A_{p,r} of the deterministic chain ODE (1-based p < r).
cd chain_ode_a_term(cd z, const ChainSpec& spec, const Quat& b_m, int p, int r);

}  // namespace rmt
