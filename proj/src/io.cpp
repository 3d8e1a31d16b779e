#include "rmt/io.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rmt {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' in " +
                              where);
}

cd parse_complex_field(const json& v, const std::string& where) {
    if (v.is_number()) return cd(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2)
        return cd(v[0].get<double>(), v[1].get<double>());
    if (v.is_string()) return parse_complex(v.get<std::string>());
    throw ConfigError("config: " + where +
                      " must be a number, [re, im] pair or a string");
}

}  // namespace

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    require_keys(j, "top level",
                 {"experiment", "ensemble", "geometry", "chain", "sampling",
                  "stats", "flow", "output"});

    ExperimentConfig cfg;
    cfg.hash = content_hash(j.dump());

    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config: 'experiment' (string) is mandatory");
    cfg.experiment = j["experiment"].get<std::string>();
    static const std::set<std::string> known = {"locallaw", "flow", "stats",
                                               "schur", "detchains"};
    if (!known.count(cfg.experiment))
        throw ConfigError("config: unknown experiment '" + cfg.experiment +
                          "'");

    if (!j.contains("sampling") || !j["sampling"].is_object())
        throw ConfigError("config: 'sampling' block is mandatory");
    {
        const json& s = j["sampling"];
        require_keys(s, "sampling", {"samples", "seed", "parallelism"});
        if (!s.contains("seed"))
            throw ConfigError("config: sampling.seed is mandatory");
        cfg.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("samples")) cfg.samples = s["samples"].get<int>();
        if (cfg.samples < 1) throw ConfigError("config: sampling.samples >= 1");
        if (s.contains("parallelism"))
            cfg.threads = s["parallelism"].get<int>();
    }

    if (j.contains("ensemble")) {
        const json& e = j["ensemble"];
        require_keys(e, "ensemble", {"n", "epsilon", "model", "base_law",
                                     "delta"});
        if (!e.contains("n")) throw ConfigError("config: ensemble.n is mandatory");
        cfg.ens.n = e["n"].get<int>();
        if (e.contains("epsilon")) cfg.ens.epsilon = e["epsilon"].get<double>();
        if (e.contains("model")) cfg.ens.model = e["model"].get<std::string>();
        if (e.contains("base_law"))
            cfg.ens.base_law = e["base_law"].get<std::string>();
        if (e.contains("delta")) cfg.ens.delta = e["delta"].get<double>();
        cfg.ens.seed = cfg.seed;
        try {
            cfg.ens.validate();
        } catch (const ConfigError& err) {
            throw ConfigError(std::string("config: ensemble: ") + err.what());
        }
    } else if (cfg.experiment != "detchains") {
        throw ConfigError("config: 'ensemble' block is mandatory for " +
                          cfg.experiment);
    }

    if (j.contains("geometry")) {
        const json& g = j["geometry"];
        require_keys(g, "geometry", {"z", "delta", "tau", "etas", "eta_grid"});
        if (g.contains("z")) cfg.z = parse_complex_field(g["z"], "geometry.z");
        if (g.contains("delta")) cfg.delta = g["delta"].get<double>();
        if (g.contains("tau")) cfg.tau = g["tau"].get<double>();
        if (g.contains("etas"))
            for (const auto& v : g["etas"]) cfg.etas.push_back(v.get<double>());
        if (g.contains("eta_grid")) {
            const json& eg = g["eta_grid"];
            require_keys(eg, "geometry.eta_grid", {"min", "max", "points"});
            const double lo = eg.at("min").get<double>();
            const double hi = eg.at("max").get<double>();
            const int pts = eg.at("points").get<int>();
            if (!(lo > 0.0) || !(hi > lo) || pts < 1)
                throw ConfigError(
                    "config: geometry.eta_grid needs 0 < min < max, points >= 1");
            for (int i = 0; i < pts; ++i)
                cfg.etas.push_back(
                    lo * std::pow(hi / lo,
                                  pts == 1 ? 0.0 : double(i) / double(pts - 1)));
        }
        if ((g.contains("etas") || g.contains("eta_grid")) && cfg.etas.empty())
            throw ConfigError("config: geometry eta grid is empty");
    }

    if (j.contains("chain")) {
        const json& c = j["chain"];
        require_keys(c, "chain", {"w", "B", "b_m"});
        if (!c.contains("w")) throw ConfigError("config: chain.w is mandatory");
        for (const auto& v : c["w"])
            cfg.chain.w.push_back(parse_complex_field(v, "chain.w"));
        if (c.contains("B"))
            for (const auto& v : c["B"])
                cfg.chain.B.push_back(parse_deformation(v.get<std::string>()));
        if (c.contains("b_m"))
            cfg.b_m = parse_deformation(c["b_m"].get<std::string>());
        try {
            cfg.chain.validate();
        } catch (const std::exception& err) {
            throw ConfigError(std::string("config: chain: ") + err.what());
        }
        cfg.has_chain = true;
    }

    if (j.contains("stats")) {
        const json& s = j["stats"];
        require_keys(s, "stats", {"t", "k", "n_grid", "bump_width"});
        if (s.contains("t")) cfg.t = s["t"].get<double>();
        if (s.contains("k")) cfg.k = s["k"].get<int>();
        if (s.contains("n_grid")) cfg.n_grid = s["n_grid"].get<int>();
        if (s.contains("bump_width"))
            cfg.bump_width = s["bump_width"].get<double>();
        if (cfg.t <= 0.0) throw ConfigError("config: stats.t > 0");
        if (cfg.k < 1 || cfg.k > 2) throw ConfigError("config: stats.k in {1,2}");
    }

    if (j.contains("flow")) {
        const json& f = j["flow"];
        require_keys(f, "flow", {"t_end", "dt", "w0", "mode"});
        if (f.contains("t_end")) cfg.t_end = f["t_end"].get<double>();
        if (f.contains("dt")) cfg.dt = f["dt"].get<double>();
        if (f.contains("w0")) cfg.w0 = parse_complex_field(f["w0"], "flow.w0");
        if (f.contains("mode")) cfg.flow_mode = f["mode"].get<std::string>();
        if (cfg.flow_mode != "characteristic" && cfg.flow_mode != "zig")
            throw ConfigError("config: flow.mode is characteristic or zig");
        if (cfg.t_end <= 0.0) throw ConfigError("config: flow.t_end > 0");
    }

    if (j.contains("output")) {
        const json& o = j["output"];
        require_keys(o, "output", {"dir"});
        if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
    }

    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
    if (!out_) throw std::runtime_error("csv: cannot open '" + path + "'");
    for (size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw std::runtime_error("csv: row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

void CsvWriter::row_values(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt_g17(v));
    row(cells);
}

}  // namespace rmt
