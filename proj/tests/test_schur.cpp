#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rmt/ensembles.hpp"
#include "rmt/rng.hpp"
#include "rmt/schur.hpp"
#include "rmt/spectral.hpp"

using namespace rmt;

namespace {

Eigen::VectorXcd random_unit(int n, Rng& rng) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.cnormal();
    return v / v.norm();
}

Eigen::MatrixXcd ginibre(int n, std::uint64_t seed, std::uint64_t idx = 0) {
    EnsembleSpec s;
    s.n = n;
    s.seed = seed;
    return sample_matrix(s, idx);
}

}  // namespace

TEST_CASE("householder rotation maps e1 to v") {
    Rng rng(1);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 12;
        Eigen::VectorXcd v = random_unit(n, rng);
        if (rep == 0) {
            v(0) = 0.0;  // exercise the zero-leading-entry branch
            v /= v.norm();
        }
        const Eigen::MatrixXcd r = householder_with_first_column(v);
        CHECK((r.adjoint() * r - Eigen::MatrixXcd::Identity(n, n))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        CHECK((r.col(0) - v).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS(householder_with_first_column(
        Eigen::VectorXcd::Constant(4, cd(1.0))));
}

TEST_CASE("deflation compresses to the orthogonal complement") {
    Rng rng(2);
    const int n = 10;
    const Eigen::MatrixXcd X = ginibre(n, 3);
    const Eigen::VectorXcd v = random_unit(n, rng);
    const Eigen::MatrixXcd x1 = householder_deflate(X, v);
    REQUIRE(x1.rows() == n - 1);
    // Full rotation: top-left entry of R^* X R is v^* X v.
    const Eigen::MatrixXcd r = householder_with_first_column(v);
    const Eigen::MatrixXcd full = r.adjoint() * X * r;
    CHECK(std::abs(full(0, 0) - cd(v.adjoint() * X * v)) < 1e-12);
    CHECK((full.bottomRightCorner(n - 1, n - 1) - x1).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("minor identity holds to high precision at N = 16") {
    Rng rng(3);
    const int n = 16;
    const Eigen::MatrixXcd X = ginibre(n, 5);
    for (int rep = 0; rep < 3; ++rep) {
        const Eigen::VectorXcd v = random_unit(n, rng);
        const double res = minor_identity_residual(X, cd(0.2, 0.1), 0.3, v);
        CHECK(res < 1e-9);
    }
}

TEST_CASE("bingham sampler at X = 0 is exactly Haar") {
    const int n = 16;
    const Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
    BinghamDensity mu(X, cd(0.0), 0.5);
    Rng rng(7);
    // KS test of |v_1|^2 against Beta(1, N-1): F(x) = 1 - (1-x)^{N-1}.
    const int m = 2000;
    std::vector<double> xs;
    for (int s = 0; s < m; ++s) {
        const Eigen::VectorXcd v = mu.sample(rng);
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        xs.push_back(std::norm(v(0)));
    }
    CHECK(mu.acceptance_rate() == 1.0);  // constant quadratic form
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < m; ++i) {
        const double f = 1.0 - std::pow(1.0 - xs[i], double(n - 1));
        ks = std::max(ks, std::abs(f - double(i + 1) / m));
        ks = std::max(ks, std::abs(f - double(i) / m));
    }
    CHECK(ks < 2.0 * 1.36 / std::sqrt(double(m)));
}

TEST_CASE("bingham sampler matches importance sampling moments") {
    const int n = 16;
    const Eigen::MatrixXcd X = ginibre(n, 9);
    const cd z(0.3, 0.0);
    const double t = 2.0;
    BinghamDensity mu(X, z, t);
    Rng rng(11);

    const int m = 4000;
    double mean_u = 0.0, var_u = 0.0;
    std::vector<double> us;
    for (int s = 0; s < m; ++s) {
        const Eigen::VectorXcd v = mu.sample(rng);
        const double u = mu.quad_form(v);
        us.push_back(u);
        mean_u += u;
    }
    mean_u /= m;
    for (double u : us) var_u += (u - mean_u) * (u - mean_u);
    var_u /= double(m - 1);
    const double se_rej = std::sqrt(var_u / m);
    CHECK(mu.acceptance_rate() > 1e-3);

    // Importance sampling from Haar with weights e^{-(N/t) u}.
    Rng rng2(13);
    Eigen::MatrixXcd xz = X;
    xz.diagonal().array() -= z;
    const Eigen::MatrixXcd A = xz.adjoint() * xz;
    double wsum = 0.0, wu = 0.0, wuu = 0.0;
    const int mis = 200000;
    const double c = double(n) / t;
    for (int s = 0; s < mis; ++s) {
        const Eigen::VectorXcd v = random_unit(n, rng2);
        const double u = (v.adjoint() * A * v).value().real();
        const double w = std::exp(-c * u);
        wsum += w;
        wu += w * u;
        wuu += w * u * u;
    }
    const double is_mean = wu / wsum;
    const double is_var = wuu / wsum - is_mean * is_mean;
    // Effective sample size for the IS standard error.
    const double se_is = std::sqrt(is_var / double(mis) * 10.0);
    CHECK(std::abs(mean_u - is_mean) <
          5.0 * std::sqrt(se_rej * se_rej + se_is * se_is));
}

TEST_CASE("quad_form equals the direct quadratic form") {
    const int n = 8;
    const Eigen::MatrixXcd X = ginibre(n, 15);
    const cd z(0.1, -0.2);
    BinghamDensity mu(X, z, 0.7);
    Rng rng(17);
    const Eigen::VectorXcd v = random_unit(n, rng);
    Eigen::MatrixXcd xz = X;
    xz.diagonal().array() -= z;
    CHECK(std::abs(mu.quad_form(v) - (xz * v).squaredNorm()) < 1e-12);
}

TEST_CASE("K normalization at X = 0 matches the closed form") {
    const int n = 16;
    const Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
    const cd z(0.3, 0.0);
    const double t = 0.2;
    const double log_closed = std::log(k_closed_form_x0(n, z, t));

    const KResult ki = k_normalizer(X, z, t, KMethod::integral);
    CHECK(std::abs(ki.log_k - log_closed) < 1e-6);

    // The quadratic form is constant at X = 0, so MC is exact too.
    const KResult km = k_normalizer(X, z, t, KMethod::mc, 1000);
    CHECK(km.mc_se_rel < 1e-12);
    CHECK(std::abs(km.log_k - log_closed) < 1e-10);
}

TEST_CASE("K integral and MC agree on a random matrix") {
    const int n = 16;
    const Eigen::MatrixXcd X = ginibre(n, 19);
    const cd z(0.2, 0.1);
    const double t = 0.5;
    const KResult ki = k_normalizer(X, z, t, KMethod::integral);
    const KResult km = k_normalizer(X, z, t, KMethod::mc, 400000);
    const double rel = std::abs(std::expm1(km.log_k - ki.log_k));
    CHECK(rel < std::max(0.01, 4.0 * km.mc_se_rel));
}

TEST_CASE("K MC method rejects large N") {
    const Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(128, 128);
    CHECK_THROWS(k_normalizer(X, cd(0.0), 0.5, KMethod::mc, 1000));
}

TEST_CASE("laplace phi is minimized at eta_z^2") {
    const int n = 32;
    const Eigen::MatrixXcd X = ginibre(n, 21);
    const cd z(0.25, 0.0);
    const double t = 0.2;
    const double eta = eta_z_solve(X, z, t);
    const double x0 = eta * eta;
    const double phi0 = laplace_phi(X, z, t, x0);
    for (double f : {0.2, 0.5, 0.9, 1.1, 2.0, 5.0}) {
        if (f == 1.0) continue;
        CHECK(laplace_phi(X, z, t, f * x0) > phi0);
    }
    // Derivative vanishes at the solution of the eta_z equation.
    const double h = 1e-6 * x0;
    const double der =
        (laplace_phi(X, z, t, x0 + h) - laplace_phi(X, z, t, x0 - h)) / (2.0 * h);
    CHECK(std::abs(der) < 1e-6);
}

TEST_CASE("laplace phi closed form at X = 0") {
    const int n = 12;
    const Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
    const double t = 0.3;
    // phi(x) = x/t - log x; argmin x = t = eta_z^2.
    CHECK(std::abs(laplace_phi(X, cd(0.0), t, 0.7) - (0.7 / t - std::log(0.7))) <
          1e-12);
    const double eta = eta_z_solve(X, cd(0.0), t);
    CHECK(std::abs(eta * eta - t) < 1e-10);
}

TEST_CASE("concentration suite produces controlled quantiles") {
    const int n = 64;
    const Eigen::MatrixXcd X = ginibre(n, 25);
    const double eps = 0.4;
    const double t = std::pow(double(n), -1.0 + 2.0 * eps);
    const ConcentrationReport rep =
        concentration_suite(X, t, cd(0.2, 0.0), 200);
    CHECK(rep.eta > 0.0);
    CHECK(rep.acceptance > 1e-4);
    CHECK(rep.q99_conc1 < 10.0 * rep.scale);
    CHECK(rep.q99_conc2 < 10.0 * rep.scale);
    CHECK(rep.q99_conc3 < 10.0 * rep.scale);
    CHECK(rep.q99_det_rel < 10.0 * rep.scale);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(rep.entry1_ratio(i, j) < 100.0);
            CHECK(rep.entry2_ratio(i, j) < 100.0);
        }
    CHECK_THROWS(concentration_suite(X, t, cd(0.2, 0.0), 5));
}

TEST_CASE("F bound oracle stays below the bound shape") {
    const int n = 32;
    const Eigen::MatrixXcd X = ginibre(n, 27);
    const double t = 0.3;
    const FBoundReport rep = f_bound_oracle(X, cd(0.1, 0.0), t, 2000);
    CHECK(std::isfinite(rep.log_f_mc));
    CHECK(rep.ratio_log < 5.0);
}
