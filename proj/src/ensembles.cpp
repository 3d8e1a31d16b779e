#include "rmt/ensembles.hpp"

#include <cmath>
#include <stdexcept>

namespace rmt {

double EnsembleSpec::q() const { return std::pow(double(n), epsilon); }

void EnsembleSpec::validate() const {
    if (n < 2) throw ConfigError("ensemble: n must be >= 2");
    if (epsilon <= 0.0 || epsilon > 1.0)
        throw ConfigError("ensemble: epsilon must lie in (0,1]");
    if (model != "ginibre" && model != "sparse" && model != "heavy")
        throw ConfigError("ensemble: unknown model '" + model + "'");
    if (base_law != "phase" && base_law != "gaussian" && base_law != "pareto")
        throw ConfigError("ensemble: unknown base_law '" + base_law + "'");
    if (model == "heavy" && delta <= 0.0)
        throw ConfigError("ensemble: heavy model requires delta > 0");
}

cd draw_base(const std::string& law, Rng& rng) {
    if (law == "phase") return rng.cphase();
    if (law == "gaussian") return rng.cnormal();
    if (law == "pareto") {
        // Uniform phase times Pareto(alpha = 4.5) radius, normalized so that
        // E r^2 = 1: tail P(r > x) = (r0/x)^alpha, r0^2 = (alpha-2)/alpha.
        const double alpha = 4.5;
        const double r0 = std::sqrt((alpha - 2.0) / alpha);
        const double r = r0 * std::pow(rng.uniform_pos(), -1.0 / alpha);
        return r * rng.cphase();
    }
    throw ConfigError("unknown base law '" + law + "'");
}

cd TruncatedLaw::draw(Rng& rng) const {
    cd y = draw_base(base, rng);
    if (std::abs(y) > lambda) y = 0.0;
    return (y - mean) / scale;
}

TruncatedLaw truncate_heavy(const std::string& base_law, int n, double eps,
                            double delta) {
    if (delta <= 0.0) throw ConfigError("truncate_heavy: delta must be > 0");
    TruncatedLaw law;
    law.base = base_law;
    law.lambda = std::pow(double(n), 0.5 - eps);

    // Calibrate the clipped law's mean and second moment once, with a fixed
    // internal stream, so the resulting entry law is exactly normalized and
    // fully deterministic.
    const long calib = 1000000;
    Rng rng(0x7a57ed5eedULL);
    cd mean = 0.0;
    double m2 = 0.0;
    long mismatches = 0;
    for (long i = 0; i < calib; ++i) {
        cd y = draw_base(base_law, rng);
        if (std::abs(y) > law.lambda) {
            y = 0.0;
            ++mismatches;
        }
        mean += y;
        m2 += std::norm(y);
    }
    mean /= double(calib);
    m2 /= double(calib);
    law.mean = mean;
    law.scale = std::sqrt(std::max(m2 - std::norm(mean), 1e-300));
    law.mismatch_prob = double(mismatches) / double(calib);
    return law;
}

Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, Rng& rng) {
    spec.validate();
    const int n = spec.n;
    Eigen::MatrixXcd x(n, n);
    const double rootn = std::sqrt(double(n));
    if (spec.model == "ginibre") {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) x(i, j) = rng.cnormal() / rootn;
    } else if (spec.model == "sparse") {
        // X_ij = N^{-eps/2} xi_ij x_ij, xi ~ Bernoulli(N^{-1+eps}).
        const double amp = std::pow(double(n), -spec.epsilon / 2.0);
        const double p = std::pow(double(n), -1.0 + spec.epsilon);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const cd base = draw_base(spec.base_law, rng);
                x(i, j) = rng.bernoulli(p) ? amp * base : cd(0.0);
            }
    } else {  // heavy
        const TruncatedLaw law =
            truncate_heavy(spec.base_law == "phase" ? "pareto" : spec.base_law,
                           n, spec.epsilon, spec.delta);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) x(i, j) = law.draw(rng) / rootn;
    }
    return x;
}

Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, std::uint64_t idx) {
    Rng rng = Rng(spec.seed).child(idx);
    return sample_matrix(spec, rng);
}

void ou_step(Eigen::MatrixXcd& X, double dt, Rng& rng, bool exact) {
    if (dt < 0.0) throw std::invalid_argument("ou_step: dt must be >= 0");
    if (dt == 0.0) return;
    const int n = int(X.rows());
    const double decay = exact ? std::exp(-dt / 2.0) : 1.0 - dt / 2.0;
    const double noise =
        std::sqrt((exact ? 1.0 - std::exp(-dt) : dt) / double(n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            X(i, j) = decay * X(i, j) + noise * rng.cnormal();
}

const CumulantEntry& CumulantReport::at(int r, int s) const {
    for (const auto& e : table)
        if (e.r == r && e.s == s) return e;
    throw std::out_of_range("cumulant (r,s) not in report");
}

CumulantReport rescaled_cumulants(const EnsembleSpec& spec, int r_max,
                                  long min_entry_samples) {
    spec.validate();
    const long per_matrix = long(spec.n) * spec.n;
    const long draws = (min_entry_samples + per_matrix - 1) / per_matrix;
    if (draws * per_matrix < min_entry_samples)
        throw std::runtime_error("rescaled_cumulants: insufficient samples");

    // Accumulate E X^r Xbar^s and E |X^r Xbar^s|^2 for the standard error.
    std::map<std::pair<int, int>, std::pair<cd, double>> acc;
    long count = 0;
    for (long d = 0; d < draws; ++d) {
        Eigen::MatrixXcd x = sample_matrix(spec, std::uint64_t(d));
        for (int j = 0; j < spec.n; ++j)
            for (int i = 0; i < spec.n; ++i) {
                const cd v = x(i, j);
                const cd vb = std::conj(v);
                for (int r = 0; r <= r_max; ++r)
                    for (int s = 0; r + s <= r_max; ++s) {
                        if (r + s == 0) continue;
                        cd term = 1.0;
                        for (int k = 0; k < r; ++k) term *= v;
                        for (int k = 0; k < s; ++k) term *= vb;
                        auto& a = acc[{r, s}];
                        a.first += term;
                        a.second += std::norm(term);
                    }
            }
        count += per_matrix;
    }

    auto factorial = [](int k) {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };

    CumulantReport report;
    const double q = spec.q();
    for (const auto& [rs, a] : acc) {
        const auto [r, s] = rs;
        const double pref =
            spec.n * std::pow(q, r + s - 2) * factorial(r) * factorial(s);
        const cd mean = a.first / double(count);
        const double var = std::max(a.second / double(count) - std::norm(mean), 0.0);
        report.table.push_back(
            {r, s, pref * mean, pref * std::sqrt(var / double(count))});
    }
    return report;
}

}  // namespace rmt
