// Experiment configuration (JSON), deterministic CSV emission and the
// config content hash carried by every summary.

#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmt/chain.hpp"
#include "rmt/ensembles.hpp"
#include "rmt/quat.hpp"

namespace rmt {

struct ExperimentConfig {
    std::string experiment;  // locallaw | flow | stats | schur | detchains
    EnsembleSpec ens;

    // geometry
    cd z = cd(0.0, 0.0);
    double delta = 0.5;
    double tau = 0.3;
    std::vector<double> etas;

    // chain
    ChainSpec chain;
    Quat b_m = Quat::basis(0);
    bool has_chain = false;

    // sampling
    int samples = 10;
    std::uint64_t seed = 0;
    int threads = 1;

    // experiment-specific knobs
    double t = 0.1;       // stats / schur Gaussian time
    int k = 1;            // stats correlation order
    int n_grid = 128;     // stats quadrature grid
    double bump_width = 0.7;
    double t_end = 0.5;   // flow horizon
    double dt = 0.01;     // zig step
    cd w0 = cd(0.0, 1.0); // flow starting spectral parameter
    std::string flow_mode = "characteristic";  // characteristic | zig

    std::string out_dir = ".";
    std::string hash;     // content hash of the canonical config text
};

// Parses and validates; throws ConfigError with a key-precise message on
// schema violations (unknown keys rejected, seed mandatory).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// FNV-1a 64-bit hash of the canonical (sorted-key) JSON dump, hex encoded.
std::string content_hash(const std::string& text);

// Deterministic number formatting: shortest round-trip via %.17g.
std::string fmt_g17(double x);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    // Convenience: formats doubles with fmt_g17.
    void row_values(const std::vector<double>& values);

private:
    std::ofstream out_;
    size_t width_;
};

}  // namespace rmt
