#include "rmt/resolvent.hpp"

#include <cmath>
#include <stdexcept>

#include "rmt/lapack.hpp"

namespace rmt {

namespace {

// Per-mode resolvent coefficients: g_k = [[w, s],[s, w]] / (s^2 - w^2).
inline void mode_g(cd w, double s, cd& diag, cd& off) {
    const cd d = 1.0 / (s * s - w * w);
    diag = w * d;
    off = s * d;
}

// Per-mode |G| coefficients: |G|_k = [[c1, c2],[c2, c1]] with
// c1 = (p+q)/2, c2 = (p-q)/2, p = 1/|s-w|, q = 1/|s+w| (eigenvalues of
// W_z are +-s_k with eigenvectors (u_k, +-v_k)/sqrt(2)).
inline void mode_absg(cd w, double s, double& c1, double& c2) {
    const double p = 1.0 / std::abs(s - w);
    const double q = 1.0 / std::abs(s + w);
    c1 = 0.5 * (p + q);
    c2 = 0.5 * (p - q);
}

}  // namespace

Hermitisation::Hermitisation(const Eigen::MatrixXcd& X, cd z) {
    n_ = int(X.rows());
    if (X.cols() != n_) throw std::invalid_argument("Hermitisation: square X required");
    z_ = z;
    Eigen::MatrixXcd xz = X;
    xz.diagonal().array() -= z;
    svd_complex(xz, u_, sigma_, v_);
}

const Eigen::MatrixXcd& Hermitisation::wmat() const {
    if (!wmat_) wmat_ = u_.adjoint() * v_;
    return *wmat_;
}

Eigen::MatrixXcd Hermitisation::to_mode(const Eigen::MatrixXcd& y) const {
    Eigen::MatrixXcd out(y.rows(), y.cols());
    out.topRows(n_) = u_.adjoint() * y.topRows(n_);
    out.bottomRows(n_) = v_.adjoint() * y.bottomRows(n_);
    return out;
}

Eigen::MatrixXcd Hermitisation::from_mode(const Eigen::MatrixXcd& y) const {
    Eigen::MatrixXcd out(y.rows(), y.cols());
    out.topRows(n_) = u_ * y.topRows(n_);
    out.bottomRows(n_) = v_ * y.bottomRows(n_);
    return out;
}

void Hermitisation::apply_G_mode(cd w, Eigen::MatrixXcd& y) const {
    Eigen::VectorXcd dg(n_), off(n_);
    for (int k = 0; k < n_; ++k) mode_g(w, sigma_(k), dg(k), off(k));
    const Eigen::MatrixXcd top = y.topRows(n_);
    y.topRows(n_) = dg.asDiagonal() * top + off.asDiagonal() * y.bottomRows(n_);
    y.bottomRows(n_) =
        off.asDiagonal() * top + dg.asDiagonal() * y.bottomRows(n_);
}

void Hermitisation::apply_absG_mode(cd w, Eigen::MatrixXcd& y) const {
    Eigen::VectorXd c1(n_), c2(n_);
    for (int k = 0; k < n_; ++k) mode_absg(w, sigma_(k), c1(k), c2(k));
    const Eigen::MatrixXcd top = y.topRows(n_);
    y.topRows(n_) = c1.asDiagonal() * top + c2.asDiagonal() * y.bottomRows(n_);
    y.bottomRows(n_) =
        c2.asDiagonal() * top + c1.asDiagonal() * y.bottomRows(n_);
}

void Hermitisation::apply_B_mode(const Quat& b, Eigen::MatrixXcd& y) const {
    // Q^* B Q = [[(ep+em) I, f W], [fs W^*, (ep-em) I]], W = U^* V.
    const cd alpha = b.ep + b.em, beta = b.ep - b.em;
    if (b.f == cd(0.0) && b.fs == cd(0.0)) {
        y.topRows(n_) *= alpha;
        y.bottomRows(n_) *= beta;
        return;
    }
    const Eigen::MatrixXcd& W = wmat();
    Eigen::MatrixXcd top = alpha * y.topRows(n_);
    if (b.f != cd(0.0)) top.noalias() += b.f * (W * y.bottomRows(n_));
    Eigen::MatrixXcd bot = beta * y.bottomRows(n_);
    if (b.fs != cd(0.0)) bot.noalias() += b.fs * (W.adjoint() * y.topRows(n_));
    y.topRows(n_) = top;
    y.bottomRows(n_) = bot;
}

Eigen::MatrixXcd Hermitisation::apply_G(cd w, const Eigen::MatrixXcd& y) const {
    Eigen::MatrixXcd m = to_mode(y);
    apply_G_mode(w, m);
    return from_mode(m);
}

Eigen::MatrixXcd Hermitisation::dense_G(cd w) const {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(2 * n_, 2 * n_);
    return apply_G(w, y);
}

Eigen::MatrixXcd Hermitisation::dense_absG(cd w) const {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(2 * n_, 2 * n_);
    Eigen::MatrixXcd m = to_mode(y);
    apply_absG_mode(w, m);
    return from_mode(m);
}

double Hermitisation::abs_resolvent_check(cd w, double L, int quad_points) const {
    if (w.imag() == 0.0) throw std::invalid_argument("abs_resolvent_check: Im w != 0");
    const double E = w.real();
    const double eta = std::abs(w.imag());
    const double xmax = std::pow(double(n_), L);
    const double theta_max = std::atan(xmax / eta);
    if (quad_points < 3) quad_points = 3;
    if (quad_points % 2 == 0) ++quad_points;  // composite Simpson needs odd

    // Per-mode quadrature of (2/pi) int_0^{xmax} Im g(E + i eta_x)/eta_x dx
    // with x = eta tan(theta); Im g is the elementwise imaginary part since
    // g is complex-symmetric.
    Eigen::VectorXd q1 = Eigen::VectorXd::Zero(n_), q2 = Eigen::VectorXd::Zero(n_);
    const double h = theta_max / (quad_points - 1);
    for (int i = 0; i < quad_points; ++i) {
        const double theta = h * i;
        const double x = eta * std::tan(theta);
        const double eta_x = std::sqrt(eta * eta + x * x);
        const double jac = eta / std::pow(std::cos(theta), 2);  // dx/dtheta
        double simp = (i == 0 || i == quad_points - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double weight = simp * h / 3.0 * jac / eta_x;
        const cd wx(E, eta_x);
        for (int k = 0; k < n_; ++k) {
            cd dg, off;
            mode_g(wx, sigma_(k), dg, off);
            q1(k) += weight * dg.imag();
            q2(k) += weight * off.imag();
        }
    }
    q1 *= 2.0 / M_PI;
    q2 *= 2.0 / M_PI;

    double dev = 0.0;
    for (int k = 0; k < n_; ++k) {
        double c1, c2;
        mode_absg(w, sigma_(k), c1, c2);
        dev = std::max(dev, std::abs(q1(k) - c1));
        dev = std::max(dev, std::abs(q2(k) - c2));
    }
    return dev;
}

namespace {

Eigen::MatrixXcd probe_block(int rows, int count, Rng& rng) {
    static const cd roots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Eigen::MatrixXcd z(rows, count);
    for (int j = 0; j < count; ++j)
        for (int i = 0; i < rows; ++i) z(i, j) = roots[rng.next_u64() & 3];
    return z;
}

}  // namespace

TraceResult ChainEvaluator::trace() const {
    const int k = int(w.size());
    if (int(B.size()) != k)
        throw std::invalid_argument("chain trace: need one B per resolvent");
    const int n = h->n();
    const bool exact =
        mode == TraceMode::exact || (mode == TraceMode::automatic && n <= 512);

    if (exact) {
        Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
        for (int j = k - 1; j >= 0; --j) {
            h->apply_B_mode(B[j], y);
            h->apply_G_mode(w[j], y);
        }
        return {y.trace() / double(2 * n), 0.0, false};
    }

    const int p = std::max(probes, 16);
    Rng rng(probe_seed);
    const Eigen::MatrixXcd z = probe_block(2 * n, p, rng);
    Eigen::MatrixXcd y = z;
    for (int j = k - 1; j >= 0; --j) {
        h->apply_B_mode(B[j], y);
        h->apply_G_mode(w[j], y);
    }
    cd mean = 0.0;
    std::vector<cd> vals(p);
    for (int j = 0; j < p; ++j) {
        vals[j] = z.col(j).dot(y.col(j)) / double(2 * n);
        mean += vals[j];
    }
    mean /= double(p);
    double var = 0.0;
    for (int j = 0; j < p; ++j) var += std::norm(vals[j] - mean);
    return {mean, std::sqrt(var / (double(p) * std::max(p - 1, 1))), true};
}

Eigen::MatrixXcd ChainEvaluator::apply(const Eigen::MatrixXcd& y) const {
    const int k = int(w.size());
    if (int(B.size()) != k - 1)
        throw std::invalid_argument("chain apply: need k-1 interior B's");
    const int n = h->n();
    // Original basis: each B is block-scalar (O(N) per column), each G is
    // one mode round trip (O(N^2) per column).
    Eigen::MatrixXcd cur = h->apply_G(w[k - 1], y);
    for (int j = k - 2; j >= 0; --j) {
        Eigen::MatrixXcd top = (B[j].ep + B[j].em) * cur.topRows(n) +
                               B[j].f * cur.bottomRows(n);
        Eigen::MatrixXcd bot = B[j].fs * cur.topRows(n) +
                               (B[j].ep - B[j].em) * cur.bottomRows(n);
        cur.topRows(n) = top;
        cur.bottomRows(n) = bot;
        cur = h->apply_G(w[j], cur);
    }
    return cur;
}

cd ChainEvaluator::entry(int i, int j) const {
    const int n2 = 2 * h->n();
    if (i < 0 || j < 0 || i >= n2 || j >= n2)
        throw std::out_of_range("chain entry index");
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n2, 1);
    e(j, 0) = 1.0;
    return apply(e)(i, 0);
}

cd ChainEvaluator::row_sum(int i, int block) const {
    const int n = h->n();
    if (i < 0 || i >= 2 * n) throw std::out_of_range("row_sum row index");
    Eigen::MatrixXcd ones = Eigen::MatrixXcd::Zero(2 * n, 1);
    if (block == 0)
        ones.topRows(n).setOnes();
    else
        ones.bottomRows(n).setOnes();
    return apply(ones)(i, 0);
}

std::vector<std::vector<Quat>> all_basis_patterns(int k) {
    std::vector<std::vector<Quat>> out;
    std::vector<int> idx(k, 0);
    while (true) {
        std::vector<Quat> pat(k);
        for (int j = 0; j < k; ++j) pat[j] = Quat::basis(idx[j]);
        out.push_back(std::move(pat));
        int j = k - 1;
        while (j >= 0 && ++idx[j] == 4) idx[j--] = 0;
        if (j < 0) break;
    }
    return out;
}

namespace {

struct BatchContext {
    const Hermitisation* h;
    const std::vector<cd>* w;
    const Eigen::MatrixXcd* z;  // probes or identity block
    bool exact;
    int p;
    std::vector<TraceResult>* results;
};

// Depth-first suffix sharing: `depth` counts deformations applied from the
// right; y holds  G(w_{depth+1}) B_{depth+1} ... G(w_k) B_k  applied to the
// probe block.  node maps (pattern prefix fixed so far) lazily: we recurse
// over the distinct B values occurring at position `depth` among patterns
// whose suffix matches the current path.
void batch_recurse(const BatchContext& ctx,
                   const std::vector<const std::vector<Quat>*>& pats,
                   const std::vector<int>& which, int depth,
                   const Eigen::MatrixXcd& y) {
    const int k = int(ctx.w->size());
    if (depth == k) {
        // y = full chain applied to probes/identity.
        for (size_t t = 0; t < which.size(); ++t) {
            const int id = which[t];
            if (ctx.exact) {
                (*ctx.results)[id] = {y.trace() / double(y.rows()), 0.0, false};
            } else {
                const int p = ctx.p;
                cd mean = 0.0;
                std::vector<cd> vals(p);
                for (int j = 0; j < p; ++j) {
                    vals[j] = ctx.z->col(j).dot(y.col(j)) / double(y.rows());
                    mean += vals[j];
                }
                mean /= double(p);
                double var = 0.0;
                for (int j = 0; j < p; ++j) var += std::norm(vals[j] - mean);
                (*ctx.results)[id] = {
                    mean, std::sqrt(var / (double(p) * std::max(p - 1, 1))), true};
            }
        }
        return;
    }
    // Position from the right: deformation index k-1-depth.
    const int pos = k - 1 - depth;
    // Group the surviving patterns by their B at `pos`.
    std::vector<std::pair<Quat, std::vector<int>>> groups;
    for (size_t t = 0; t < pats.size(); ++t) {
        const Quat& b = (*pats[t])[pos];
        bool found = false;
        for (auto& g : groups)
            if (g.first == b) {
                g.second.push_back(int(t));
                found = true;
                break;
            }
        if (!found) groups.push_back({b, {int(t)}});
    }
    for (const auto& g : groups) {
        Eigen::MatrixXcd next = y;
        ctx.h->apply_B_mode(g.first, next);
        ctx.h->apply_G_mode((*ctx.w)[pos], next);
        std::vector<const std::vector<Quat>*> sub_pats;
        std::vector<int> sub_which;
        for (int t : g.second) {
            sub_pats.push_back(pats[t]);
            sub_which.push_back(which[t]);
        }
        batch_recurse(ctx, sub_pats, sub_which, depth + 1, next);
    }
}

}  // namespace

std::vector<TraceResult> chain_trace_batch(
    const Hermitisation& h, const std::vector<cd>& w,
    const std::vector<std::vector<Quat>>& patterns, TraceMode mode, int probes,
    std::uint64_t probe_seed) {
    const int k = int(w.size());
    for (const auto& p : patterns)
        if (int(p.size()) != k)
            throw std::invalid_argument("chain_trace_batch: pattern length mismatch");
    const int n = h.n();
    const bool exact =
        mode == TraceMode::exact || (mode == TraceMode::automatic && n <= 512);
    const int p = std::max(probes, 16);

    Eigen::MatrixXcd z;
    if (exact) {
        z = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
    } else {
        Rng rng(probe_seed);
        z = probe_block(2 * n, p, rng);
    }

    std::vector<TraceResult> results(patterns.size());
    BatchContext ctx{&h, &w, &z, exact, p, &results};
    std::vector<const std::vector<Quat>*> pats;
    std::vector<int> which;
    for (size_t t = 0; t < patterns.size(); ++t) {
        pats.push_back(&patterns[t]);
        which.push_back(int(t));
    }
    batch_recurse(ctx, pats, which, 0, z);
    return results;
}

}  // namespace rmt
