// Partial Schur decomposition pipeline: sampling from the tilted spherical
// density mu, Householder deflation, the K normalization and the
// concentration / determinant statistical suites.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rmt/quat.hpp"
#include "rmt/resolvent.hpp"
#include "rmt/rng.hpp"

namespace rmt {

// Density proportional to exp(-(N/t) ||X_z v||^2) on the complex unit
// sphere, with respect to unit-mass Haar measure.
class BinghamDensity {
public:
    BinghamDensity(const Eigen::MatrixXcd& X, cd z, double t);

    int n() const { return n_; }
    double t() const { return t_; }
    const Eigen::VectorXd& sigma() const { return sigma_; }

    // Exact rejection sample; acceptance statistics accumulate across calls.
    Eigen::VectorXcd sample(Rng& rng) const;
    double acceptance_rate() const;

    // log density ratio against Haar at quadratic-form value u = v^* A v,
    // A = X_z^* X_z (unnormalized).
    double log_weight(double u) const { return -(double(n_) / t_) * u; }

    // u = v^* X_z^* X_z v for an arbitrary unit vector.
    double quad_form(const Eigen::VectorXcd& v) const;

private:
    int n_;
    double t_;
    double beta_;          // envelope precision scale: g ~ CN(0,(1+beta A)^{-1})
    double log_env_max_;   // sup_u of the log acceptance ratio
    Eigen::VectorXd sigma_;   // singular values of X - z
    Eigen::MatrixXcd basis_;  // V from the SVD (eigenbasis of A)
    mutable std::uint64_t trials_ = 0, accepts_ = 0;
};

// Unitary matrix whose first column is v (Householder times a phase).
Eigen::MatrixXcd householder_with_first_column(const Eigen::VectorXcd& v);

// Trailing (N-1) x (N-1) block of R^* X R with R as above.
Eigen::MatrixXcd householder_deflate(const Eigen::MatrixXcd& X,
                                     const Eigen::VectorXcd& v);

// Max-abs residual of the minor identity
//   P diag(0, G^(1)) P^* = G - G V (V^* G V)^{-1} V^* G,
// P = 1_2 (x) R, V = 1_2 (x) v, at spectral parameter i eta.
double minor_identity_residual(const Eigen::MatrixXcd& X, cd z, double eta,
                               const Eigen::VectorXcd& v);

enum class KMethod { integral, mc };

struct KResult {
    double log_k;       // log of the normalization (unit-mass Haar)
    double value;       // exp(log_k); may overflow to inf for large N
    double mc_se_rel;   // relative standard error (mc method only)
};

// Normalization K of the mu density: integral method evaluates the
// oscillatory p-integral on a parabolic contour; mc method averages the
// density prefactor over Haar samples (small N).
KResult k_normalizer(const Eigen::MatrixXcd& X, cd z, double t, KMethod method,
                     int mc_samples = 200000, std::uint64_t seed = 11);

// Closed form at X = 0: K = (N/(pi t))^{N-1} e^{-N |z|^2 / t}.
double k_closed_form_x0(int n, cd z, double t);

struct ConcentrationReport {
    std::vector<double> conc1, conc2, conc3;  // per-sample deviations
    std::vector<double> det_rel;              // per-sample |det ratio - 1|
    double eta;                   // eta_z(t)
    double scale;                 // log N / sqrt(N t)
    double q99_conc1, q99_conc2, q99_conc3;   // 0.99 quantiles of the deviations
    double q99_det_rel;           // |det(V*GV)| relative deviation from the prediction
    Eigen::Matrix2d entry1_ratio; // max |(V*GV)^{-1}| entrywise / predicted shape
    Eigen::Matrix2d entry2_ratio; // max |V* G F G F G V| entrywise / predicted shape (p = 2)
    double acceptance;            // sampler acceptance rate
};

// Samples v ~ mu and audits the quadratic-form concentration bounds, the
// determinant approximation and the entrywise bounds.
ConcentrationReport concentration_suite(const Eigen::MatrixXcd& X, double t,
                                        cd z, int samples,
                                        std::uint64_t seed = 17);

// phi(x) = x/t - <log(x + |X_z|^2)>, evaluated from singular values.
double laplace_phi(const Eigen::MatrixXcd& X, cd z, double t, double x);
double laplace_phi(const Eigen::VectorXd& sigma, double t, double x);

struct FBoundReport {
    double log_f_mc;     // log of the MC estimate of F_{N-1}
    double log_f_bound;  // log of the (constant-free) upper-bound shape
    double ratio_log;    // log_f_mc - log_f_bound
};

// k = 1 oracle: F_{N-1}(z, X^(1)) = E |det(X^(1) - z + sqrt(Nt/(N-1)) Y)|^2
// by MC over GinUE(N-1), against the bound shape
// (Nt)^{1/2} e^{-N eta^2 / t} det(eta^2 + |X_z|^2).
FBoundReport f_bound_oracle(const Eigen::MatrixXcd& X, cd z, double t,
                            int samples, std::uint64_t seed = 23);

}  // namespace rmt
