#include "rmt/scalar_law.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rmt {

namespace {

// Cubic P(m) = m^3 + 2w m^2 + (w^2 - |z|^2 + 1) m + w, derived from the
// defining equation by clearing the m and (m+w) denominators.
struct Cubic {
    cd c2, c1, c0;
    cd eval(cd m) const { return ((m + c2) * m + c1) * m + c0; }
    cd deriv(cd m) const { return (3.0 * m + 2.0 * c2) * m + c1; }
};

Cubic law_cubic(cd w, cd z) {
    const double z2 = std::norm(z);
    return {2.0 * w, w * w - z2 + 1.0, w};
}

}  // namespace

double law_residual(cd m, cd w, cd z) {
    const double z2 = std::norm(z);
    return std::abs(1.0 / m + m + w - z2 / (m + w));
}

cd solve_m(cd w, cd z) {
    if (w.imag() == 0.0) throw std::invalid_argument("solve_m: Im w must be nonzero");
    const Cubic p = law_cubic(w, z);

    // Companion-matrix eigenvalues give all three roots without branch cuts.
    Eigen::Matrix3cd comp = Eigen::Matrix3cd::Zero();
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    comp(0, 2) = -p.c0;
    comp(1, 2) = -p.c1;
    comp(2, 2) = -p.c2;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(comp, /*computeEigenvectors=*/false);

    // Keep the root on the physical branch Im w * Im m > 0 with the smallest
    // residual of the original (un-cleared) equation; the cleared cubic has a
    // spurious root near m = -w which the branch condition rejects.
    cd best{};
    double best_res = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        cd r = es.eigenvalues()(i);
        // Newton polish on the cubic before judging the branch; companion
        // eigenvalues carry O(1e-14) noise that can flip a tiny Im m.
        for (int it = 0; it < 4; ++it) {
            const cd d = p.deriv(r);
            if (d == cd(0.0)) break;
            r -= p.eval(r) / d;
        }
        if (w.imag() * r.imag() <= 0.0) continue;
        const double res = law_residual(r, w, z);
        if (res < best_res) {
            best_res = res;
            best = r;
        }
    }
    if (!std::isfinite(best_res)) {
        throw std::runtime_error("solve_m: no root on the physical branch");
    }
    // Final polish on the original (un-cleared) equation: the cubic's
    // coefficients grow like w^3, so its machine-precision root can still
    // leave an absolute residual above 1e-12 at large |w|.
    const double z2 = std::norm(z);
    for (int it = 0; it < 3; ++it) {
        const cd mw = best + w;
        const cd f = 1.0 / best + best + w - z2 / mw;
        const cd fp = -1.0 / (best * best) + 1.0 + z2 / (mw * mw);
        if (fp == cd(0.0)) break;
        const cd next = best - f / fp;
        if (w.imag() * next.imag() <= 0.0) break;
        best = next;
    }
    return best;
}

Quat m_quat(cd w, cd z) {
    const cd m = solve_m(w, z);
    const cd u = m / (m + w);
    Quat q;
    q.ep = m;
    q.f = -z * u;
    q.fs = -std::conj(z) * u;
    return q;
}

cd m_prime(cd w, cd z) {
    const cd m = solve_m(w, z);
    // P(m, w) = 0  =>  m' = -P_w / P_m.
    const cd pw = 2.0 * m * m + 2.0 * w * m + 1.0;
    const cd pm = law_cubic(w, z).deriv(m);
    return -pw / pm;
}

double m_prime_bound(cd w, cd z) {
    const double gap = std::abs(1.0 - std::norm(z));
    return 1.0 / (gap + std::pow(std::abs(w.imag()), 2.0 / 3.0));
}

Quat mhat_quat(cd w, cd z, cd tr_g) {
    const cd s = tr_g + w;
    const cd uh = 1.0 / (std::norm(z) - s * s);
    Quat q;
    q.ep = s * uh;
    q.f = -z * uh;
    q.fs = -std::conj(z) * uh;
    return q;
}

std::vector<double> eta_grid(double eta_min, double eta_max, int n) {
    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = eta_min;
        return grid;
    }
    const double step = std::log(eta_max / eta_min) / (n - 1);
    for (int i = 0; i < n; ++i) grid[i] = eta_min * std::exp(step * i);
    return grid;
}

}  // namespace rmt
