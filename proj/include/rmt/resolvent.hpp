// Resolvent engine for the Hermitisation
//
//     W_z = [[0, X-z], [(X-z)^*, 0]],   G_z(w) = (W_z - w)^{-1}.
//
// One SVD X - z = U S V^* per (X, z) serves every spectral parameter w:
// in the "mode basis" Q = blkdiag(U, V) the resolvent is 2x2 per singular
// value,
//
//     Q^* G_z(w) Q |_k = [[w, s_k], [s_k, w]] / (s_k^2 - w^2),
//
// so applying G costs O(N) per column, and applying an algebra element
// B = a E+ + b E- + c F + d F~ costs O(N) for the diagonal part plus one
// product with the unitary W = U^*V per off-diagonal coefficient.  Chain
// traces are evaluated exactly (identity block) for small N and by a
// Hutchinson estimator with unit-modulus probes for large N.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rmt/chain.hpp"
#include "rmt/quat.hpp"
#include "rmt/rng.hpp"

namespace rmt {

class Hermitisation {
  public:
    Hermitisation(const Eigen::MatrixXcd& X, cd z);

    int n() const { return n_; }
    cd z() const { return z_; }
    const Eigen::VectorXd& sigma() const { return sigma_; }
    const Eigen::MatrixXcd& u() const { return u_; }
    const Eigen::MatrixXcd& v() const { return v_; }
    // W = U^* V (built on first use; not thread-safe for the first call).
    const Eigen::MatrixXcd& wmat() const;

    // --- original-basis operations ------------------------------------
    // Apply G_z(w) to the columns of y (2N x k), cost O(N^2 k).
    Eigen::MatrixXcd apply_G(cd w, const Eigen::MatrixXcd& y) const;
    // Dense blocks (test/oracle use, small N).
    Eigen::MatrixXcd dense_G(cd w) const;
    Eigen::MatrixXcd dense_absG(cd w) const;

    // --- mode-basis operations (basis Q = blkdiag(U,V)) ----------------
    Eigen::MatrixXcd to_mode(const Eigen::MatrixXcd& y) const;
    Eigen::MatrixXcd from_mode(const Eigen::MatrixXcd& y) const;
    void apply_G_mode(cd w, Eigen::MatrixXcd& y) const;       // in place
    void apply_absG_mode(cd w, Eigen::MatrixXcd& y) const;    // in place
    void apply_B_mode(const Quat& b, Eigen::MatrixXcd& y) const;

    // Quadrature check of the integral representation
    //   |G_z(w)| = (2/pi) int_0^{N^L} Im G_z(E + i eta_x) / eta_x dx,
    // eta_x = sqrt(eta^2 + x^2).  Returns max deviation from the exact
    // |G| over all mode entries.
    double abs_resolvent_check(cd w, double L, int quad_points) const;

  private:
    int n_;
    cd z_;
    Eigen::VectorXd sigma_;
    Eigen::MatrixXcd u_, v_;
    mutable std::optional<Eigen::MatrixXcd> wmat_;
};

enum class TraceMode { automatic, exact, stochastic };

struct TraceResult {
    cd value;
    double stderr_ = 0.0;  // 0 for exact evaluation
    bool stochastic = false;
};

struct ChainEvaluator {
    const Hermitisation* h = nullptr;
    std::vector<cd> w;     // k resolvents
    std::vector<Quat> B;   // k deformations for traces, k-1 for entries
    TraceMode mode = TraceMode::automatic;
    int probes = 64;       // >= 16 in stochastic mode
    std::uint64_t probe_seed = 0x9e3779b9ULL;

    // Normalized trace <G(w_1) B_1 ... G(w_k) B_k> (requires |B| == k).
    TraceResult trace() const;

    // Entry (G(w_1) B_1 ... G(w_k))_{ij} (requires |B| == k-1).
    cd entry(int i, int j) const;

    // Row sum over one index block: sum_{j in block} (chain)_{ij};
    // block 0 = first N columns, block 1 = last N.
    cd row_sum(int i, int block) const;

    // Apply the (entry-form) chain G B ... G to columns of y.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& y) const;
};

// Batched traces sharing probes and suffix applications: for the given w
// (length k) evaluates <G B_1 G B_2 ... G B_k> for every pattern
// (B_1..B_k) in `patterns`.  Patterns sharing a common suffix reuse work,
// so evaluating all 4^k basis patterns costs ~sum_j 4^j applications.
std::vector<TraceResult> chain_trace_batch(
    const Hermitisation& h, const std::vector<cd>& w,
    const std::vector<std::vector<Quat>>& patterns, TraceMode mode,
    int probes, std::uint64_t probe_seed);

// All k-tuples over the 4-element basis {E+, E-, F, F~}, lexicographic.
std::vector<std::vector<Quat>> all_basis_patterns(int k);

}  // namespace rmt
