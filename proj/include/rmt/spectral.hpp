// Eigenvalue statistics: GinUE kernel predictions, Girko-formula checks,
// the eta_z / sigma_z solvers and the log-det chain expansion.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rmt/ensembles.hpp"
#include "rmt/quat.hpp"

namespace rmt {

// det[K(z_i, z_j)] with K(z, z') = pi^{-1} exp(-(|z|^2+|z'|^2)/2 + conj(z) z').
// k <= 6.
double ginue_rho_k(const std::vector<cd>& points);

// Isotropic Gaussian bump f(z) = amp * exp(-|z - center|^2 / (2 width^2)).
struct GaussianBump {
    cd center;
    double width;
    double amp = 1.0;

    double operator()(cd z) const {
        const double r2 = std::norm(z - center);
        return amp * std::exp(-r2 / (2.0 * width * width));
    }
    // Laplacian of f (closed form).
    double laplacian(cd z) const {
        const double s2 = width * width;
        const double r2 = std::norm(z - center);
        return (r2 / (s2 * s2) - 2.0 / s2) * (*this)(z);
    }
    // integral over the plane
    double mass() const { return amp * 2.0 * M_PI * width * width; }
};

struct GirkoReport {
    double lhs;       // sum_j f(lambda_j)
    double rhs;       // (2 pi)^{-1} int Delta f log|det(X - z)| d^2 z
    double residual;  // |lhs - rhs|
};

// Both sides of Girko's formula; the right side by an n_grid x n_grid
// midpoint quadrature over the square [-half, half]^2 around the bump
// center, log|det| by LU factorization per grid node.
GirkoReport girko_check(const Eigen::MatrixXcd& X, const GaussianBump& f,
                        int n_grid, double half_width = 3.0);

// Solves t <H_z(i eta)> = 1 for eta > 0 given the singular values of X - z.
double eta_z_solve(const Eigen::VectorXd& sigma, double t);
double eta_z_solve(const Eigen::MatrixXcd& X, cd z, double t);

// sigma_z = eta^2 <H Htilde> + |<H^2 X_z>|^2 / <H^2> at eta = eta_z(t).
double sigma_z(const Eigen::MatrixXcd& X, cd z, double t);

struct KPointReport {
    double mc;        // Monte Carlo estimate of the rescaled statistic
    double se;        // standard error over samples
    double predicted; // closed-form GinUE kernel integral
    double zscore;    // (mc - predicted) / se
};

// Rescaled k-point statistic: per sample, sum over ordered distinct
// k-tuples of prod_j f(sqrt(N sigma) (lambda_{i_j} - z)).  f is the same
// Gaussian bump for every slot; k in {1, 2}; `rescale` = N * sigma_z.
KPointReport kpoint_compare(const std::vector<Eigen::VectorXcd>& samples,
                            cd z_center, double rescale, int k,
                            const GaussianBump& f);

// Closed-form kernel integrals for the Gaussian-bump statistic:
// k = 1: int f / pi = 2 s^2 * amp; k = 2: amp^2 * 16 s^6 / (1 + 4 s^2).
double ginue_bump_prediction(int k, const GaussianBump& f);

// log det(W_{z + x/sqrt(N)} - i eta) - log det(W_z - i eta) versus the
// truncated chain series -sum_{l<=n} l^{-1} N^{-l/2} tr (G (xF + conj(x)F~))^l.
struct LogdetReport {
    double lhs;
    cd rhs;
    double residual;
};
LogdetReport logdet_expansion_check(const Eigen::MatrixXcd& X, cd z, cd x,
                                    double eta, int n_terms);

// chi^2 statistic of the radial eigenvalue histogram against the uniform
// disk law (smoke test for the circular law).
double circular_chi2(const Eigen::VectorXcd& evals, int bins);

}  // namespace rmt
