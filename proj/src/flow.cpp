#include "rmt/flow.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "rmt/det_chains.hpp"
#include "rmt/locallaw.hpp"
#include "rmt/resolvent.hpp"
#include "rmt/scalar_law.hpp"

namespace rmt {

FlowState flow_forward(cd z0, cd w0, double t, double eta_floor) {
    const cd m0 = solve_m(w0, z0);
    FlowState st;
    st.t = t;
    const double ep = std::exp(t / 2.0), em = std::exp(-t / 2.0);
    st.w = w0 * em - m0 * (ep - em);
    st.z = z0 * em;
    st.m = solve_m(st.w, st.z);
    if (eta_floor > 0.0 && std::abs(st.w.imag()) < eta_floor) st.stopped = true;
    return st;
}

FlowState flow_reverse(cd z0, cd w0, double t) {
    const cd m0 = solve_m(w0, z0);
    FlowState st;
    st.t = -t;
    const double ep = std::exp(t / 2.0), em = std::exp(-t / 2.0);
    st.w = w0 * ep + m0 * (ep - em);
    st.z = z0 * ep;
    st.m = solve_m(st.w, st.z);
    return st;
}

double stop_time(cd z0, cd w0, double eta_floor) {
    // Along the flow, |Im w_t| = |Im w_0| e^{-t/2} - |Im m_0|(e^{t/2}-e^{-t/2})
    // (the branch condition makes the two imaginary parts same-signed).
    // Solving for s = e^{t/2}:  |Im m_0| s^2 + eta_floor s - (|Im w_0| + |Im m_0|) = 0.
    const cd m0 = solve_m(w0, z0);
    const double y0 = std::abs(w0.imag());
    const double mu = std::abs(m0.imag());
    if (y0 <= eta_floor) return 0.0;
    if (mu == 0.0) return 2.0 * std::log(y0 / eta_floor);
    const double s =
        (-eta_floor + std::sqrt(eta_floor * eta_floor + 4.0 * mu * (y0 + mu))) /
        (2.0 * mu);
    return 2.0 * std::log(s);
}

namespace {

// Adaptive Simpson quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    const double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 40);
}

}  // namespace

double integral_bound_ratio(cd z0, cd w0, double alpha, double t) {
    if (alpha <= 0.0) throw std::invalid_argument("integral_bound_ratio: alpha > 0");
    if (t == 0.0) return 0.0;
    const cd m0 = solve_m(w0, z0);
    const double y0 = std::abs(w0.imag());
    const double mu = std::abs(m0.imag());
    auto im_w = [&](double s) {
        const double ep = std::exp(s / 2.0), em = std::exp(-s / 2.0);
        return y0 * em - mu * (ep - em);
    };
    const double yt = im_w(t);
    if (yt <= 0.0) throw std::invalid_argument("integral_bound_ratio: t beyond stopping time");
    auto integrand = [&](double s) {
        return std::pow(im_w(s), -(alpha + 1.0));
    };
    const double lhs = integrate(integrand, 0.0, t, 1e-12 * std::pow(yt, -alpha));
    const double mt = std::abs(solve_m(flow_forward(z0, w0, t).w, flow_z(z0, t)).imag());
    const double rhs = 1.0 / (mt * std::pow(yt, alpha));
    return lhs / rhs;
}

std::vector<ZigzagStage> schedule(double eps, double delta1, double tau_target,
                                  int n_dim) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("schedule: eps in (0,1)");
    std::vector<ZigzagStage> stages;
    const double budget = std::pow(double(n_dim), -eps);
    double tau = 1.0;
    int j = 0;
    while (tau - eps >= tau_target - 1e-12) {
        ++j;
        tau -= eps;
        stages.push_back({j, tau, delta1 - double(j) * budget, budget});
    }
    return stages;
}

ZigRunResult zig_run(const EnsembleSpec& spec, std::uint64_t idx, cd z0,
                     const ChainSpec& chain, const Quat& b_m, double t_end,
                     double dt, int m_threshold) {
    if (spec.n > 512)
        throw std::invalid_argument("zig_run: N <= 512 required for exact traces");
    if (dt <= 0.0 || dt > 1e-2 + 1e-15)
        throw std::invalid_argument("zig_run: need 0 < dt <= 1e-2");
    chain.validate();
    const int m = chain.m();
    const int a = chain.a_count(&b_m);
    const double q = spec.q();

    Rng stream = Rng(spec.seed).child(idx);
    Eigen::MatrixXcd x = sample_matrix(spec, stream);

    // Initial m_0 for each characteristic (z flows once, shared).
    std::vector<cd> m0(m);
    for (int j = 0; j < m; ++j) m0[j] = solve_m(chain.w[j], z0);

    ZigRunResult out;
    cd integral = 0.0;  // accumulated (drift + sum A) dt
    cd s0 = 0.0;

    const int steps = int(std::round(t_end / dt));
    for (int step = 0; step <= steps; ++step) {
        const double t = step * dt;
        if (step > 0) ou_step(x, dt, stream, /*exact=*/true);

        ZigStep rec;
        rec.t = t;
        const double ep = std::exp(t / 2.0), em = std::exp(-t / 2.0);
        rec.z_t = z0 * em;
        ChainSpec flowed = chain;
        double eta_t = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            flowed.w[j] = chain.w[j] * em - m0[j] * (ep - em);
            eta_t = std::min(eta_t, std::abs(flowed.w[j].imag()));
        }
        rec.eta_t = eta_t;
        if (eta_t < 1.0 / double(spec.n)) {
            out.truncated = true;
            break;
        }

        Hermitisation h(x, rec.z_t);

        auto g_trace = [&](const std::vector<cd>& ws, const std::vector<Quat>& bs) {
            ChainEvaluator ev{&h, ws, bs, TraceMode::exact, 0};
            return ev.trace().value;
        };

        // S^av_t.
        std::vector<Quat> bs(flowed.B);
        bs.push_back(b_m);
        const cd g_chain = g_trace(flowed.w, bs);
        const cd m_chain_tr = tr_chain_det(rec.z_t, flowed, b_m);
        rec.s_av = g_chain - m_chain_tr;
        rec.psi = psi_av(double(spec.n), q, eta_t, m, a, m_threshold);
        rec.drift = 0.5 * double(m) * rec.s_av;

        // A_{p,p} = <G_p - M_p> <G_1 B_1 ... G_p^2 B_p ... G_m B_m>.
        for (int p = 1; p <= m; ++p) {
            const cd g_p = g_trace({flowed.w[p - 1]}, {Quat::basis(0)});
            const cd m_p = solve_m(flowed.w[p - 1], rec.z_t);
            std::vector<cd> ws;
            std::vector<Quat> bsq;
            for (int j = 1; j <= m; ++j) {
                ws.push_back(flowed.w[j - 1]);
                if (j == p) {  // G_p^2 = G_p E+ G_p
                    ws.push_back(flowed.w[j - 1]);
                    bsq.push_back(Quat::basis(0));
                }
                bsq.push_back(j < m ? flowed.B[j - 1] : b_m);
            }
            rec.a_pp.push_back((g_p - m_p) * g_trace(ws, bsq));
        }

        // A_{p,r} (p < r), G part minus M part, per the Ito decomposition.
        for (int p = 1; p <= m; ++p) {
            for (int r = p + 1; r <= m; ++r) {
                cd term = 0.0;
                for (int nu = 0; nu < 2; ++nu) {
                    const Quat e_nu = Quat::basis(nu);
                    const double sign = nu == 0 ? 1.0 : -1.0;
                    // Tr{G_p B_p ... G_r E_nu}.
                    std::vector<cd> ws_in;
                    std::vector<Quat> bs_in;
                    for (int j = p; j <= r; ++j) ws_in.push_back(flowed.w[j - 1]);
                    for (int j = p; j < r; ++j) bs_in.push_back(flowed.B[j - 1]);
                    bs_in.push_back(e_nu);
                    const cd g_in = g_trace(ws_in, bs_in);
                    // Tr{G_r B_r ... G_m B_m G_1 B_1 ... G_p E_nu}.
                    std::vector<cd> ws_out;
                    std::vector<Quat> bs_out;
                    for (int j = r; j <= m; ++j) ws_out.push_back(flowed.w[j - 1]);
                    for (int j = 1; j <= p; ++j) ws_out.push_back(flowed.w[j - 1]);
                    for (int j = r; j < m; ++j) bs_out.push_back(flowed.B[j - 1]);
                    bs_out.push_back(b_m);
                    for (int j = 1; j < p; ++j) bs_out.push_back(flowed.B[j - 1]);
                    bs_out.push_back(e_nu);
                    const cd g_out = g_trace(ws_out, bs_out);

                    // Deterministic counterparts.
                    ChainSpec inner;
                    inner.w = ws_in;
                    inner.B.assign(bs_in.begin(), bs_in.end() - 1);
                    const cd m_in = tr_chain_det(rec.z_t, inner, e_nu);
                    ChainSpec outer;
                    outer.w = ws_out;
                    outer.B.assign(bs_out.begin(), bs_out.end() - 1);
                    const cd m_out = tr_chain_det(rec.z_t, outer, e_nu);

                    term += sign * (g_in * g_out - m_in * m_out);
                }
                rec.a_pr.push_back(term);
            }
        }

        if (step == 0) s0 = rec.s_av;
        rec.mart_resid = rec.s_av - s0 - integral;
        out.max_ratio = std::max(out.max_ratio, std::abs(rec.s_av) / rec.psi);
        out.steps.push_back(rec);

        // Euler accumulation of the recorded deterministic terms.
        cd all_a = 0.0;
        for (cd v : rec.a_pp) all_a += v;
        for (cd v : rec.a_pr) all_a += v;
        integral += (rec.drift + all_a) * dt;
    }
    return out;
}

}  // namespace rmt
