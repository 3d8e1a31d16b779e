#include "rmt/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "rmt/lapack.hpp"
#include "rmt/resolvent.hpp"

namespace rmt {

double ginue_rho_k(const std::vector<cd>& points) {
    const int k = int(points.size());
    if (k < 1 || k > 6)
        throw std::invalid_argument("ginue_rho_k: 1 <= k <= 6");
    Eigen::MatrixXcd ker(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const cd zi = points[i], zj = points[j];
            ker(i, j) = std::exp(-0.5 * (std::norm(zi) + std::norm(zj)) +
                                 std::conj(zi) * zj) /
                        M_PI;
        }
    return ker.determinant().real();
}

GirkoReport girko_check(const Eigen::MatrixXcd& X, const GaussianBump& f,
                        int n_grid, double half_width) {
    const int n = int(X.rows());
    if (n > 256) throw std::invalid_argument("girko_check: N <= 256");
    if (n_grid < 2) throw std::invalid_argument("girko_check: n_grid >= 2");

    GirkoReport rep;
    const Eigen::VectorXcd evals = eigvals_complex(X);
    rep.lhs = 0.0;
    for (int j = 0; j < n; ++j) rep.lhs += f(evals(j));

    // Midpoint rule on [-hw, hw]^2 around the bump center.
    const double h = 2.0 * half_width / double(n_grid);
    double acc = 0.0;
    Eigen::MatrixXcd shifted(n, n);
    for (int ix = 0; ix < n_grid; ++ix) {
        const double re = -half_width + (ix + 0.5) * h;
        for (int iy = 0; iy < n_grid; ++iy) {
            const double im = -half_width + (iy + 0.5) * h;
            const cd z = f.center + cd(re, im);
            const double lap = f.laplacian(z);
            if (std::abs(lap) < 1e-300) continue;
            shifted = X;
            shifted.diagonal().array() -= z;
            // log|det| from the LU diagonal.
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
            double logdet = 0.0;
            for (int d = 0; d < n; ++d)
                logdet += std::log(std::abs(lu.matrixLU()(d, d)));
            acc += lap * logdet;
        }
    }
    rep.rhs = acc * h * h / (2.0 * M_PI);
    rep.residual = std::abs(rep.lhs - rep.rhs);
    return rep;
}

double eta_z_solve(const Eigen::VectorXd& sigma, double t) {
    if (t <= 0.0) throw std::invalid_argument("eta_z_solve: t > 0");
    const int n = int(sigma.size());
    auto obj = [&](double eta) {
        double tr = 0.0;
        for (int k = 0; k < n; ++k)
            tr += 1.0 / (sigma(k) * sigma(k) + eta * eta);
        return t * tr / double(n) - 1.0;
    };
    // obj is strictly decreasing in eta; bracket then bisect.
    double lo = 1e-12, hi = std::sqrt(t);
    int guard = 0;
    while (obj(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("eta_z_solve: no upper bracket");
    }
    guard = 0;
    while (obj(lo) < 0.0) {
        lo /= 2.0;
        if (++guard > 200) throw std::runtime_error("eta_z_solve: no lower bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (obj(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    // Newton polish.
    double eta = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        double val = 0.0, der = 0.0;
        for (int k = 0; k < n; ++k) {
            const double d = sigma(k) * sigma(k) + eta * eta;
            val += 1.0 / d;
            der += -2.0 * eta / (d * d);
        }
        val = t * val / double(n) - 1.0;
        der = t * der / double(n);
        const double step = val / der;
        if (!std::isfinite(step)) break;
        eta -= step;
        if (std::abs(step) < 1e-16 * eta) break;
    }
    if (!(eta > 0.0) || std::abs(obj(eta)) > 1e-12)
        throw std::runtime_error("eta_z_solve: residual above tolerance");
    return eta;
}

double eta_z_solve(const Eigen::MatrixXcd& X, cd z, double t) {
    Hermitisation h(X, z);
    return eta_z_solve(h.sigma(), t);
}

double sigma_z(const Eigen::MatrixXcd& X, cd z, double t) {
    Hermitisation h(X, z);
    const double eta = eta_z_solve(h.sigma(), t);
    const int n = h.n();
    const Eigen::VectorXd& sig = h.sigma();
    Eigen::VectorXd d(n);
    for (int k = 0; k < n; ++k) d(k) = 1.0 / (sig(k) * sig(k) + eta * eta);

    // <H Htilde> = (1/N) sum_{jk} d_j d_k |(V^* U)_{jk}|^2; wmat() = U^* V.
    const Eigen::MatrixXd w2 = h.wmat().cwiseAbs2();
    const double hht = (d.transpose() * (w2 * d)).value() / double(n);

    // <H^2 X_z> = (1/N) sum_k d_k^2 sigma_k (V^* U)_{kk}.
    cd h2x = 0.0;
    double h2 = 0.0;
    for (int k = 0; k < n; ++k) {
        h2x += d(k) * d(k) * sig(k) * std::conj(h.wmat()(k, k));
        h2 += d(k) * d(k);
    }
    h2x /= double(n);
    h2 /= double(n);
    return eta * eta * hht + std::norm(h2x) / h2;
}

KPointReport kpoint_compare(const std::vector<Eigen::VectorXcd>& samples,
                            cd z_center, double rescale, int k,
                            const GaussianBump& f) {
    if (k != 1 && k != 2) throw std::invalid_argument("kpoint_compare: k in {1,2}");
    if (samples.empty()) throw std::invalid_argument("kpoint_compare: no samples");
    const double root = std::sqrt(rescale);
    std::vector<double> stats;
    for (const auto& lam : samples) {
        double s1 = 0.0, s2 = 0.0;
        for (int j = 0; j < lam.size(); ++j) {
            const double v = f(root * (lam(j) - z_center));
            s1 += v;
            s2 += v * v;
        }
        stats.push_back(k == 1 ? s1 : s1 * s1 - s2);
    }
    KPointReport rep;
    double mean = 0.0;
    for (double v : stats) mean += v;
    mean /= double(stats.size());
    double var = 0.0;
    for (double v : stats) var += (v - mean) * (v - mean);
    var /= double(stats.size() > 1 ? stats.size() - 1 : 1);
    rep.mc = mean;
    rep.se = std::sqrt(var / double(stats.size()));
    rep.predicted = ginue_bump_prediction(k, f);
    rep.zscore = rep.se > 0.0 ? (rep.mc - rep.predicted) / rep.se : 0.0;
    return rep;
}

double ginue_bump_prediction(int k, const GaussianBump& f) {
    const double s2 = f.width * f.width;
    if (k == 1) return f.amp * 2.0 * s2;  // (1/pi) * 2 pi s^2
    if (k == 2) {
        // int f(u1) f(u2) pi^{-2} (1 - e^{-|u1 - u2|^2}) d^2u1 d^2u2
        //   = amp^2 (4 s^4 - 4 s^4 / (1 + 4 s^2)) = amp^2 16 s^6 / (1 + 4 s^2).
        return f.amp * f.amp * 16.0 * s2 * s2 * s2 / (1.0 + 4.0 * s2);
    }
    throw std::invalid_argument("ginue_bump_prediction: k in {1,2}");
}

LogdetReport logdet_expansion_check(const Eigen::MatrixXcd& X, cd z, cd x,
                                    double eta, int n_terms) {
    const int n = int(X.rows());
    if (eta <= 0.0) throw std::invalid_argument("logdet_expansion_check: eta > 0");
    const cd z_shift = z + x / std::sqrt(double(n));

    Hermitisation h0(X, z), h1(X, z_shift);
    double lhs = 0.0;
    for (int k = 0; k < n; ++k) {
        const double s0 = h0.sigma()(k), s1 = h1.sigma()(k);
        lhs += std::log((s1 * s1 + eta * eta) / (s0 * s0 + eta * eta));
    }

    // -sum_{l=1}^{n_terms} l^{-1} N^{-l/2} * 2N <(G (x F + conj(x) F~))^l>.
    Quat shift{0.0, 0.0, x, std::conj(x)};
    cd rhs = 0.0;
    for (int l = 1; l <= n_terms; ++l) {
        std::vector<cd> ws(l, cd(0.0, eta));
        std::vector<Quat> bs(l, shift);
        ChainEvaluator ev{&h0, ws, bs, TraceMode::exact, 0};
        rhs -= std::pow(double(n), -double(l) / 2.0) / double(l) * 2.0 *
               double(n) * ev.trace().value;
    }

    LogdetReport rep;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.residual = std::abs(cd(lhs, 0.0) - rhs);
    return rep;
}

double circular_chi2(const Eigen::VectorXcd& evals, int bins) {
    const int n = int(evals.size());
    // Uniform disk: P(|z| <= r) = r^2, so equal-probability radial bins have
    // edges sqrt(j / bins).
    std::vector<double> counts(bins, 0.0);
    int inside = 0;
    for (int j = 0; j < n; ++j) {
        const double r = std::abs(evals(j));
        if (r >= 1.0) continue;
        ++inside;
        int b = int(std::floor(r * r * bins));
        if (b >= bins) b = bins - 1;
        counts[b] += 1.0;
    }
    const double expected = double(inside) / double(bins);
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    return chi2;
}

}  // namespace rmt
