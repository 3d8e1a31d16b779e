#include "rmt/schur.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "rmt/lapack.hpp"
#include "rmt/spectral.hpp"

namespace rmt {

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * double(v.size() - 1);
    const size_t lo = size_t(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - double(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// log of the surface area of the unit sphere in C^N (= S^{2N-1}):
// 2 pi^N / (N-1)!.
double log_sphere_area(int n) {
    return std::log(2.0) + double(n) * std::log(M_PI) - std::lgamma(double(n));
}

}  // namespace

BinghamDensity::BinghamDensity(const Eigen::MatrixXcd& X, cd z, double t)
    : n_(int(X.rows())), t_(t) {
    if (t <= 0.0) throw std::invalid_argument("BinghamDensity: t > 0");
    Eigen::MatrixXcd xz = X;
    xz.diagonal().array() -= z;
    Eigen::MatrixXcd u;
    svd_complex(xz, u, sigma_, basis_);

    // Envelope: angular central Gaussian with precision 1 + beta A,
    // A = X_z^* X_z.  The inverse temperature beta = 2c/b with
    // sum_k 2/(b + 2 c sigma_k^2) = 1 (angular-Gaussian moment matching,
    // treating C^N as R^{2N}); the rejection is exact for any beta > 0.
    const double c = double(n_) / t_;
    auto lhs = [&](double b) {
        double s = 0.0;
        for (int k = 0; k < n_; ++k)
            s += 2.0 / (b + 2.0 * c * sigma_(k) * sigma_(k));
        return s;
    };
    double b_lo = 1e-12, b_hi = 2.0 * double(n_);
    while (lhs(b_hi) > 1.0) b_hi *= 2.0;
    if (lhs(b_lo) < 1.0) {
        beta_ = 2.0 * c / b_lo;  // degenerate: effectively the tightest envelope
    } else {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (b_lo + b_hi);
            if (lhs(mid) > 1.0)
                b_lo = mid;
            else
                b_hi = mid;
        }
        beta_ = 2.0 * c / (0.5 * (b_lo + b_hi));
    }

    // Acceptance ratio w(u) = exp(-c u) (1 + beta u)^N is concave in u with
    // maximizer t - 1/beta, clipped to the range of u = v^* A v.
    const double smin = sigma_(n_ - 1) * sigma_(n_ - 1);
    const double smax = sigma_(0) * sigma_(0);
    const double u_star = std::min(std::max(t_ - 1.0 / beta_, smin), smax);
    log_env_max_ = -c * u_star + double(n_) * std::log1p(beta_ * u_star);
}

Eigen::VectorXcd BinghamDensity::sample(Rng& rng) const {
    const double c = double(n_) / t_;
    Eigen::VectorXcd g(n_);
    for (int attempt = 0; attempt < 4000000; ++attempt) {
        ++trials_;
        double num = 0.0, den = 0.0;
        for (int k = 0; k < n_; ++k) {
            const double var = 1.0 / (1.0 + beta_ * sigma_(k) * sigma_(k));
            g(k) = std::sqrt(var) * rng.cnormal();
            const double a = std::norm(g(k));
            num += sigma_(k) * sigma_(k) * a;
            den += a;
        }
        const double u = num / den;
        const double log_ratio =
            -c * u + double(n_) * std::log1p(beta_ * u) - log_env_max_;
        if (std::log(rng.uniform_pos()) < log_ratio) {
            ++accepts_;
            if (trials_ >= 10000 && accepts_ * 10000 < trials_ * 1)
                throw std::runtime_error(
                    "BinghamDensity: acceptance rate below 1e-4; envelope "
                    "needs retuning");
            return basis_ * (g / std::sqrt(den));
        }
    }
    throw std::runtime_error("BinghamDensity: rejection sampler stalled");
}

double BinghamDensity::acceptance_rate() const {
    return trials_ == 0 ? 1.0 : double(accepts_) / double(trials_);
}

double BinghamDensity::quad_form(const Eigen::VectorXcd& v) const {
    const Eigen::VectorXcd c = basis_.adjoint() * v;
    double u = 0.0;
    for (int k = 0; k < n_; ++k) u += sigma_(k) * sigma_(k) * std::norm(c(k));
    return u;
}

Eigen::MatrixXcd householder_with_first_column(const Eigen::VectorXcd& v) {
    const int n = int(v.size());
    if (std::abs(v.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("householder: v must be unit norm");
    cd alpha = v(0);
    alpha = std::abs(alpha) > 1e-300 ? alpha / std::abs(alpha) : cd(1.0);
    Eigen::VectorXcd w = v;
    w(0) += alpha;  // no cancellation: |w(0)| = 1 + |v(0)|
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(n, n);
    h.noalias() -= (2.0 / w.squaredNorm()) * (w * w.adjoint());
    // h e1 = -conj(alpha) v; fix the first column's phase so that R e1 = v.
    h.col(0) *= -alpha;
    return h;
}

Eigen::MatrixXcd householder_deflate(const Eigen::MatrixXcd& X,
                                     const Eigen::VectorXcd& v) {
    const Eigen::MatrixXcd r = householder_with_first_column(v);
    const int n = int(X.rows());
    return (r.adjoint() * X * r).bottomRightCorner(n - 1, n - 1);
}

double minor_identity_residual(const Eigen::MatrixXcd& X, cd z, double eta,
                               const Eigen::VectorXcd& v) {
    const int n = int(X.rows());
    Hermitisation h(X, z);
    const Eigen::MatrixXcd g = h.dense_G(cd(0.0, eta));

    const Eigen::MatrixXcd x1 = householder_deflate(X, v);
    Hermitisation h1(x1, z);
    const Eigen::MatrixXcd g1 = h1.dense_G(cd(0.0, eta));

    // Embed diag(0, G^(1)) into 2N x 2N: the deflated space skips the first
    // coordinate of each N-block.
    Eigen::MatrixXcd mid = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    auto emb = [&](int i) { return i < n - 1 ? i + 1 : i + 2; };
    for (int i = 0; i < 2 * (n - 1); ++i)
        for (int j = 0; j < 2 * (n - 1); ++j) mid(emb(i), emb(j)) = g1(i, j);

    const Eigen::MatrixXcd r = householder_with_first_column(v);
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    p.topLeftCorner(n, n) = r;
    p.bottomRightCorner(n, n) = r;
    const Eigen::MatrixXcd lhs = p * mid * p.adjoint();

    Eigen::MatrixXcd vv = Eigen::MatrixXcd::Zero(2 * n, 2);
    vv.col(0).head(n) = v;
    vv.col(1).tail(n) = v;
    const Eigen::Matrix2cd small = vv.adjoint() * g * vv;
    const Eigen::MatrixXcd rhs =
        g - g * vv * small.inverse() * vv.adjoint() * g;

    return (lhs - rhs).cwiseAbs().maxCoeff();
}

namespace {

// Adaptive Simpson for complex integrands.
cd csimpson(const std::function<cd(double)>& f, double a, double b, cd fa,
            cd fm, cd fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const cd flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    const cd whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const cd left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const cd right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return csimpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
           csimpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

}  // namespace

KResult k_normalizer(const Eigen::MatrixXcd& X, cd z, double t, KMethod method,
                     int mc_samples, std::uint64_t seed) {
    const int n = int(X.rows());
    Eigen::MatrixXcd xz = X;
    xz.diagonal().array() -= z;
    Eigen::MatrixXcd u, v;
    Eigen::VectorXd sig;
    svd_complex(xz, u, sig, v);

    KResult res;
    res.mc_se_rel = 0.0;

    if (method == KMethod::mc) {
        if (n > 64)
            throw std::invalid_argument("k_normalizer: mc method needs N <= 64");
        Rng rng(seed);
        // K = (N/(pi t))^{N-1} E_Haar[exp(-(N/t) u)], u = v^* X_z^* X_z v.
        const double c = double(n) / t;
        std::vector<double> logs;
        logs.reserve(mc_samples);
        for (int s = 0; s < mc_samples; ++s) {
            double num = 0.0, den = 0.0;
            for (int k = 0; k < n; ++k) {
                const double a = std::norm(rng.cnormal());
                num += sig(k) * sig(k) * a;
                den += a;
            }
            logs.push_back(-c * num / den);
        }
        const double lmax = *std::max_element(logs.begin(), logs.end());
        double acc = 0.0, acc2 = 0.0;
        for (double l : logs) {
            const double e = std::exp(l - lmax);
            acc += e;
            acc2 += e * e;
        }
        const double mean = acc / double(mc_samples);
        const double var =
            (acc2 / double(mc_samples) - mean * mean) / double(mc_samples - 1);
        res.mc_se_rel = std::sqrt(std::max(var, 0.0)) / mean;
        res.log_k = double(n - 1) * std::log(double(n) / (M_PI * t)) + lmax +
                    std::log(mean);
        res.value = std::exp(res.log_k);
        return res;
    }

    // Integral method: with eta = eta_z(t),
    //   K = e^{N eta^2 / t} det^{-1}(eta^2 + |X_z|^2)
    //       * int e^{iNp/t} prod_k (1 + i p d_k)^{-1} dp,
    // d_k = (sigma_k^2 + eta^2)^{-1}; the stationary point is p = 0 by the
    // defining equation of eta_z.  The contour p = x + i c x^2 keeps clear
    // of the poles at i/d_k (they sit on the imaginary axis above i eta^2;
    // off axis the distance is >= |x|) and adds Gaussian damping
    // e^{-N c x^2 / t}; the integral converges to the same value since the
    // integrand is analytic between the contours and decays like |p|^{-N}.
    const double eta = eta_z_solve(sig, t);
    Eigen::VectorXd d(n);
    double sum_d2 = 0.0;
    for (int k = 0; k < n; ++k) {
        d(k) = 1.0 / (sig(k) * sig(k) + eta * eta);
        sum_d2 += d(k) * d(k);
    }
    const double curv = t * sum_d2 / (2.0 * double(n));  // contour parameter c
    auto integrand = [&](double x) {
        const cd p(x, curv * x * x);
        cd log_f = cd(0.0, double(n) / t) * p;
        for (int k = 0; k < n; ++k)
            log_f -= std::log(1.0 + cd(0.0, 1.0) * p * d(k));
        const cd dp(1.0, 2.0 * curv * x);
        return std::exp(log_f) * dp;
    };
    const double half = 12.0 / std::sqrt(0.5 * sum_d2);
    const cd f0 = integrand(0.0);
    const double tol = 1e-13 * std::abs(f0) * half;
    const cd integral = csimpson(integrand, -half, half, integrand(-half), f0,
                                 integrand(half), tol, 48);
    if (std::abs(integral.imag()) > 1e-8 * std::abs(integral))
        throw std::runtime_error("k_normalizer: integral not real");
    if (integral.real() <= 0.0)
        throw std::runtime_error("k_normalizer: integral not positive");

    double log_det = 0.0;
    for (int k = 0; k < n; ++k) log_det += std::log(sig(k) * sig(k) + eta * eta);
    // Convert from surface-area Haar (the formula's normalization) to
    // unit-mass Haar.
    res.log_k = double(n) * eta * eta / t - log_det +
                std::log(integral.real()) - log_sphere_area(n);
    res.value = std::exp(res.log_k);
    return res;
}

double k_closed_form_x0(int n, cd z, double t) {
    return std::exp(double(n - 1) * std::log(double(n) / (M_PI * t)) -
                    double(n) * std::norm(z) / t);
}

ConcentrationReport concentration_suite(const Eigen::MatrixXcd& X, double t,
                                        cd z, int samples,
                                        std::uint64_t seed) {
    const int n = int(X.rows());
    if (samples < 10)
        throw std::invalid_argument("concentration_suite: samples >= 10");
    Hermitisation h(X, z);
    const double eta = eta_z_solve(h.sigma(), t);
    const Eigen::VectorXd& sig = h.sigma();
    Eigen::VectorXd d(n);
    for (int k = 0; k < n; ++k) d(k) = 1.0 / (sig(k) * sig(k) + eta * eta);

    // Deterministic traces.
    double tr_h2 = 0.0;
    cd tr_hxh = 0.0;
    for (int k = 0; k < n; ++k) {
        tr_h2 += d(k) * d(k);
        tr_hxh += d(k) * d(k) * sig(k) * std::conj(h.wmat()(k, k));
    }
    tr_h2 /= double(n);
    tr_hxh /= double(n);
    const Eigen::MatrixXd w2 = h.wmat().cwiseAbs2();
    const double tr_hht = (d.transpose() * (w2 * d)).value() / double(n);

    BinghamDensity mu(X, z, t);
    Rng rng(seed);

    std::vector<double> c1s, c2s, c3s, dets;
    Eigen::Matrix2d e1 = Eigen::Matrix2d::Zero(), e2 = Eigen::Matrix2d::Zero();
    const double off_scale = std::max(1.0 / std::sqrt(double(n)), t);
    Eigen::Matrix2d shape1, shape2;
    shape1 << 1.0, off_scale, off_scale, t;
    const double p2 = 2.0;  // entrywise bound tested at p = 2
    shape2 << std::pow(t, -p2 / 2.0), std::pow(t, -(p2 + 1.0) / 2.0),
        std::pow(t, -(p2 + 1.0) / 2.0), std::pow(t, -p2 / 2.0 - 1.0);

    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXcd v = mu.sample(rng);
        const Eigen::VectorXcd uv = h.u().adjoint() * v;
        const Eigen::VectorXcd vv = h.v().adjoint() * v;
        double q_h = 0.0, q_ht = 0.0;
        cd q_xh = 0.0;
        for (int k = 0; k < n; ++k) {
            q_h += d(k) * std::norm(vv(k));
            q_ht += d(k) * std::norm(uv(k));
            q_xh += std::conj(uv(k)) * sig(k) * d(k) * vv(k);
        }
        c1s.push_back(t * std::abs(eta * q_h - eta * t * tr_h2));
        c2s.push_back(std::abs(eta * q_ht - eta * t * tr_hht));
        c3s.push_back(std::sqrt(t) * std::abs(q_xh - t * tr_hxh));

        const double det_lhs = eta * eta * q_h * q_ht + std::norm(q_xh);
        const double det_pred = t * t * eta * eta * tr_h2 * tr_hht;
        dets.push_back(std::abs(det_lhs / det_pred - 1.0));

        Eigen::Matrix2cd vgv;
        vgv << cd(0.0, eta) * q_ht, q_xh, std::conj(q_xh), cd(0.0, eta) * q_h;
        const Eigen::Matrix2cd inv = vgv.inverse();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                e1(i, j) = std::max(e1(i, j), std::abs(inv(i, j)) / shape1(i, j));

        // V^* G F G F G V at w = i eta (p = 2 alternating chain).
        Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(2 * n, 2);
        cols.col(0).head(n) = v;
        cols.col(1).tail(n) = v;
        Eigen::MatrixXcd y = h.apply_G(cd(0.0, eta), cols);
        for (int rep = 0; rep < 2; ++rep) {
            // F maps (a; b) -> (b; 0).
            Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(2 * n, 2);
            f.topRows(n) = y.bottomRows(n);
            y = h.apply_G(cd(0.0, eta), f);
        }
        const Eigen::Matrix2cd chain22 = cols.adjoint() * y;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                e2(i, j) =
                    std::max(e2(i, j), std::abs(chain22(i, j)) / shape2(i, j));
    }

    ConcentrationReport rep;
    rep.conc1 = c1s;
    rep.conc2 = c2s;
    rep.conc3 = c3s;
    rep.det_rel = dets;
    rep.eta = eta;
    rep.scale = std::log(double(n)) / std::sqrt(double(n) * t);
    rep.q99_conc1 = quantile(c1s, 0.99);
    rep.q99_conc2 = quantile(c2s, 0.99);
    rep.q99_conc3 = quantile(c3s, 0.99);
    rep.q99_det_rel = quantile(dets, 0.99);
    rep.entry1_ratio = e1;
    rep.entry2_ratio = e2;
    rep.acceptance = mu.acceptance_rate();
    return rep;
}

double laplace_phi(const Eigen::VectorXd& sigma, double t, double x) {
    if (x <= 0.0) throw std::invalid_argument("laplace_phi: x > 0");
    double tr = 0.0;
    for (int k = 0; k < sigma.size(); ++k)
        tr += std::log(x + sigma(k) * sigma(k));
    return x / t - tr / double(sigma.size());
}

double laplace_phi(const Eigen::MatrixXcd& X, cd z, double t, double x) {
    Hermitisation h(X, z);
    return laplace_phi(h.sigma(), t, x);
}

FBoundReport f_bound_oracle(const Eigen::MatrixXcd& X, cd z, double t,
                            int samples, std::uint64_t seed) {
    const int n = int(X.rows());
    if (n > 64) throw std::invalid_argument("f_bound_oracle: N <= 64");
    Hermitisation h(X, z);
    const double eta = eta_z_solve(h.sigma(), t);

    BinghamDensity mu(X, z, t);
    Rng rng(seed);
    const Eigen::VectorXcd v = mu.sample(rng);
    const Eigen::MatrixXcd x1 = householder_deflate(X, v);

    const int n1 = n - 1;
    const double c = std::sqrt(double(n) * t / double(n1));
    std::vector<double> logs;
    logs.reserve(samples);
    Eigen::MatrixXcd y(n1, n1), m(n1, n1);
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n1; ++j)
                y(i, j) = rng.cnormal() / std::sqrt(double(n1));
        m = x1 + c * y;
        m.diagonal().array() -= z;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
        double logdet = 0.0;
        for (int k = 0; k < n1; ++k)
            logdet += std::log(std::abs(lu.matrixLU()(k, k)));
        logs.push_back(2.0 * logdet);  // log |det|^2
    }
    const double lmax = *std::max_element(logs.begin(), logs.end());
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - lmax);

    FBoundReport rep;
    rep.log_f_mc = lmax + std::log(acc / double(samples));
    double logdet0 = 0.0;
    for (int k = 0; k < n; ++k)
        logdet0 += std::log(eta * eta + h.sigma()(k) * h.sigma()(k));
    rep.log_f_bound =
        0.5 * std::log(double(n) * t) - double(n) * eta * eta / t + logdet0;
    rep.ratio_log = rep.log_f_mc - rep.log_f_bound;
    return rep;
}

}  // namespace rmt
