// Characteristic flow for the Hermitised model and the coupled
// OU-matrix + flow ("zig") simulation.
//
// The characteristics solve dw/dt = -m_{z_t}(w_t) - w_t/2, dz/dt = -z_t/2,
// with the exact solution
//
//   w_t = w_0 e^{-t/2} - m_0 (e^{t/2} - e^{-t/2}),   z_t = z_0 e^{-t/2},
//
// along which m_{z_t}(w_t) = e^{t/2} m_0 is conserved up to the explicit
// exponential factor.

#pragma once

#include <vector>

#include "rmt/chain.hpp"
#include "rmt/ensembles.hpp"
#include "rmt/quat.hpp"

namespace rmt {

struct FlowState {
    double t = 0.0;
    cd z, w, m;          // m = m_{z_t}(w_t)
    bool stopped = false;  // flow ran past the stopping time
};

inline cd flow_z(cd z0, double t) { return z0 * std::exp(-t / 2.0); }

// Forward flow to time t; `stopped` is set (and the state left at the
// requested time regardless) when |Im w_t| has dropped below eta_floor.
FlowState flow_forward(cd z0, cd w0, double t, double eta_floor = 0.0);

// Reverse flow: w_{-t} = w_0 e^{t/2} + m_0 (e^{t/2} - e^{-t/2}),
// z_{-t} = z_0 e^{t/2}.
FlowState flow_reverse(cd z0, cd w0, double t);

// First time |Im w_t| reaches eta_floor (closed form).
double stop_time(cd z0, cd w0, double eta_floor);

// Ratio of int_0^t |Im w_s|^{-(alpha+1)} ds (adaptive quadrature) to the
// bound (|Im m_t| |Im w_t|^alpha)^{-1}.
double integral_bound_ratio(cd z0, cd w0, double alpha, double t);

// Zigzag schedule tau_j = 1 - j*eps down to tau_target.
struct ZigzagStage {
    int j;
    double tau;
    double delta;
    double max_flow_time;  // t <= N^{-eps} budget at this stage
};

std::vector<ZigzagStage> schedule(double eps, double delta1, double tau_target,
                                  int n_dim);

// ---- zig run: OU evolution of X coupled to the characteristic flow ----

struct ZigStep {
    double t;
    double eta_t;       // min_j |Im w_{j,t}|
    cd z_t;
    cd s_av;            // S^av_t = <G-chain B_m> - <M-chain B_m>
    double psi;         // Psi^av(eta_t, m, a)
    cd drift;           // (m/2) S^av_t
    std::vector<cd> a_pp;   // A_{p,p}, p = 1..m
    std::vector<cd> a_pr;   // A_{p,r}, p < r, row-major
    cd mart_resid;      // S_t - S_0 - integrated (drift + sum A)
};

struct ZigRunResult {
    std::vector<ZigStep> steps;
    bool truncated = false;
    double max_ratio = 0.0;  // max_t |S^av_t| / Psi^av
};

// Evolves X (drawn from spec, sample index idx) by the exact OU transition
// while flowing z and every w_j of the chain; records the dS decomposition
// at each step.  Exact chain traces: requires N <= 512.
ZigRunResult zig_run(const EnsembleSpec& spec, std::uint64_t idx, cd z0,
                     const ChainSpec& chain, const Quat& b_m, double t_end,
                     double dt, int m_threshold = 8);

}  // namespace rmt
