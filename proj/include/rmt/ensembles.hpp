// Random matrix models: sparse Bernoulli, truncated heavy tail, Ginibre,
// and the matrix Ornstein-Uhlenbeck evolution, plus a cumulant auditor.
//
// All generators are pure functions of (spec, seed): identical seeds give
// bit-identical matrices.  Entry normalization throughout:
// E X_ij = E X_ij^2 = 0 and E |X_ij|^2 = 1/N.

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rmt/rng.hpp"

namespace rmt {

using cd = std::complex<double>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnsembleSpec {
    int n = 0;
    double epsilon = 1.0;       // sparsity exponent, q = N^epsilon
    std::string model = "ginibre";   // ginibre | sparse | heavy
    std::string base_law = "phase";  // phase | gaussian | pareto
    std::uint64_t seed = 1;
    double delta = 0.5;         // heavy-tail moment surplus (4 + delta)

    double q() const;           // N^epsilon
    void validate() const;      // throws ConfigError
};

// Base complex entry laws with E x = E x^2 = 0, E|x|^2 = 1.
//   phase:    uniform on the unit circle.
//   gaussian: standard complex Gaussian.
//   pareto:   uniform phase times Pareto radius with finite 4.5th moment.
cd draw_base(const std::string& law, Rng& rng);

// Truncated heavy-tail entry law: base variate y clipped to |y| <= lambda
// with lambda = N^{1/2 - eps}, then recentred and rescaled so that
// E y = 0 and E|y|^2 = 1 exactly (moments calibrated once, deterministically).
struct TruncatedLaw {
    std::string base;
    double lambda;
    cd mean;        // mean of the clipped base law
    double scale;   // sqrt of second moment of the clipped, centred law
    double mismatch_prob;  // P(|y| > lambda) estimate

    cd draw(Rng& rng) const;
};

TruncatedLaw truncate_heavy(const std::string& base_law, int n, double eps,
                            double delta);

// Draw X according to spec using the supplied stream.
Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, Rng& rng);

// Convenience: sample number `idx` of the spec's root seed.
Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, std::uint64_t idx);

// One OU step dX = -X/2 dt + N^{-1/2} dB.  exact = true uses the exact
// Gaussian transition (mean decay e^{-dt/2}, variance (1 - e^{-dt})/N);
// false uses Euler-Maruyama.
void ou_step(Eigen::MatrixXcd& X, double dt, Rng& rng, bool exact = true);

// Empirical rescaled cumulants kappa_{r,s} = N q^{r+s-2} r! s! E X^r Xbar^s.
struct CumulantEntry {
    int r, s;
    cd value;
    double stderr_;
};

struct CumulantReport {
    std::vector<CumulantEntry> table;  // all r+s <= r_max
    const CumulantEntry& at(int r, int s) const;
};

CumulantReport rescaled_cumulants(const EnsembleSpec& spec, int r_max,
                                  long min_entry_samples = 10000);

}  // namespace rmt
