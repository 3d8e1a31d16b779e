#include "rmt/det_chains.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "rmt/flow.hpp"
#include "rmt/scalar_law.hpp"

namespace rmt {

namespace {

double quat_abs(const Quat& q) {
    return std::sqrt(std::norm(q.ep) + std::norm(q.em) + std::norm(q.f) +
                     std::norm(q.fs));
}

// Interval table M[i][j] for i <= j, built by increasing length.
struct ChainTable {
    int m;
    std::vector<std::vector<Quat>> t;  // t[i][j]
    double residual = 0.0;

    Quat& at(int i, int j) { return t[i][j]; }
};

ChainTable build_table(cd z, const ChainSpec& spec, double tol) {
    spec.validate();
    const int m = spec.m();
    ChainTable tab;
    tab.m = m;
    tab.t.assign(m, std::vector<Quat>(m));

    std::vector<Quat> base(m);
    for (int i = 0; i < m; ++i) {
        base[i] = m_quat(spec.w[i], z);
        tab.t[i][i] = base[i];
    }

    for (int len = 2; len <= m; ++len) {
        for (int i = 0; i + len - 1 < m; ++i) {
            const int j = i + len - 1;
            const Quat& mi = base[i];
            const Quat& mj = base[j];
            // Known part: leading deformation plus all strictly interior
            // self-energy insertions.
            Quat k = mi * spec.B[i] * tab.t[i + 1][j];
            for (int l = i + 1; l < j; ++l)
                k = k + mi * self_energy(tab.t[i][l]) * tab.t[l][j];

            // Unknown part: R = K + M_i S[R] M_j, solved over the basis.
            Eigen::Matrix4cd a;
            for (int b = 0; b < 4; ++b) {
                const Quat col = mi * self_energy(Quat::basis(b)) * mj;
                for (int r = 0; r < 4; ++r)
                    a(r, b) = (r == b ? cd(1.0) : cd(0.0)) - col.coeff(r);
            }
            Eigen::Vector4cd rhs(k.ep, k.em, k.f, k.fs);
            Eigen::FullPivLU<Eigen::Matrix4cd> lu(a);
            if (!lu.isInvertible())
                throw std::runtime_error("m_chain: singular stability system");
            const Eigen::Vector4cd c = lu.solve(rhs);
            Quat r{c(0), c(1), c(2), c(3)};
            tab.t[i][j] = r;

            const Quat resid = r - (k + mi * self_energy(r) * mj);
            const double rel = quat_abs(resid) / std::max(quat_abs(r), 1.0);
            tab.residual = std::max(tab.residual, rel);
            if (rel > tol)
                throw std::runtime_error("m_chain: fixed-point residual above tolerance");
        }
    }
    return tab;
}

}  // namespace

ChainM m_chain(cd z, const ChainSpec& spec, double tol) {
    ChainTable tab = build_table(z, spec, tol);
    ChainM out;
    out.value = tab.t[0][spec.m() - 1];
    out.residual = tab.residual;
    for (int l = 0; l < spec.m(); ++l) out.prefixes.push_back(tab.t[0][l]);
    return out;
}

cd tr_chain_det(cd z, const ChainSpec& spec, const Quat& b_m) {
    return trace_form(m_chain(z, spec).value, b_m);
}

double chain_norm_bound(cd z, const ChainSpec& spec) {
    return m_chain(z, spec).value.norm();
}

cd chain_ode_a_term(cd z, const ChainSpec& spec, const Quat& b_m, int p, int r) {
    const int m = spec.m();
    if (!(1 <= p && p < r && r <= m))
        throw std::invalid_argument("chain_ode_a_term: need 1 <= p < r <= m");
    cd total = 0.0;
    for (int nu = 0; nu < 2; ++nu) {
        const Quat e_nu = Quat::basis(nu);
        const double sign = nu == 0 ? 1.0 : -1.0;
        // Inner chain (w_p, B_p, ..., w_r) closed by E_nu.
        ChainSpec inner;
        for (int j = p; j <= r; ++j) inner.w.push_back(spec.w[j - 1]);
        for (int j = p; j < r; ++j) inner.B.push_back(spec.B[j - 1]);
        const cd inner_tr = tr_chain_det(z, inner, e_nu);
        // Outer chain (w_1, ..., w_p, E_nu, w_r, ..., w_m) closed by B_m.
        ChainSpec outer;
        for (int j = 1; j <= p; ++j) outer.w.push_back(spec.w[j - 1]);
        for (int j = r; j <= m; ++j) outer.w.push_back(spec.w[j - 1]);
        for (int j = 1; j < p; ++j) outer.B.push_back(spec.B[j - 1]);
        outer.B.push_back(e_nu);
        for (int j = r; j < m; ++j) outer.B.push_back(spec.B[j - 1]);
        const cd outer_tr = tr_chain_det(z, outer, b_m);
        total += sign * inner_tr * outer_tr;
    }
    return total;
}

namespace {

// Flow every w_j of the spec (and z) along its characteristic to time t.
bool flowed_spec(cd z, const ChainSpec& spec, double t, cd& z_t, ChainSpec& out) {
    out = spec;
    z_t = flow_z(z, t);
    for (int j = 0; j < spec.m(); ++j) {
        const FlowState st = flow_forward(z, spec.w[j], t);
        if (st.stopped) return false;
        out.w[j] = st.w;
    }
    return true;
}

}  // namespace

OdeReport chain_ode_check(cd z, const ChainSpec& spec, const Quat& b_m,
                          double t_max, double dt) {
    OdeReport rep;
    const int m = spec.m();
    const double h = 1e-6;  // central-difference step for the left side
    for (double t = 0.0; t <= t_max + 1e-12; t += dt) {
        cd z_t;
        ChainSpec flowed, fwd, bwd;
        cd z_fwd, z_bwd;
        if (!flowed_spec(z, spec, t, z_t, flowed) ||
            !flowed_spec(z, spec, t + h, z_fwd, fwd) ||
            !flowed_spec(z, spec, std::max(t - h, 0.0), z_bwd, bwd)) {
            rep.truncated = true;
            break;
        }
        const double h_lo = t < h ? t : h;
        const cd val_f = tr_chain_det(z_fwd, fwd, b_m);
        const cd val_b = tr_chain_det(z_bwd, bwd, b_m);
        const cd lhs = (val_f - val_b) / (h + h_lo);

        cd rhs = (double(m) / 2.0) * tr_chain_det(z_t, flowed, b_m);
        for (int p = 1; p <= m; ++p)
            for (int r = p + 1; r <= m; ++r)
                rhs += chain_ode_a_term(z_t, flowed, b_m, p, r);

        rep.times.push_back(t);
        rep.deviations.push_back(std::abs(lhs - rhs));
        rep.max_dev = std::max(rep.max_dev, rep.deviations.back());
    }
    return rep;
}

}  // namespace rmt
