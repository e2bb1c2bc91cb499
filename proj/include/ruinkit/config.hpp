#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruinkit/errors.hpp"
#include "ruinkit/model.hpp"
#include "ruinkit/renewal_solver.hpp"

namespace ruinkit {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_number_token(const std::string& raw, const std::string& where) {
    std::string t = trim(raw);
    if (!t.empty() && t.front() == '+') t.erase(t.begin());
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw ConfigError("config: " + where + ": not a number: '" + raw + "'");
    return v;
}

} // namespace detail

// Minimal TOML-style reader covering exactly what run configs use:
// [section] headers, key = value lines, '#' comments, numbers, quoted
// strings, booleans as bare words, and flat arrays of numbers.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        ConfigFile cfg = parse_string(buffer.str(), path);
        cfg.origin_dir_ = std::filesystem::path(path).parent_path().string();
        return cfg;
    }

    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>") {
        ConfigFile cfg;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            // Strip a comment, honoring '#' inside quoted strings.
            bool in_quote = false;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') in_quote = !in_quote;
                else if (line[i] == '#' && !in_quote) {
                    line.erase(i);
                    break;
                }
            }
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": malformed section header");
                section = detail::trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
            cfg.values_[section + "." + key] = value;
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) != 0;
    }

    double number(const std::string& section, const std::string& key) const {
        return detail::parse_number_token(raw(section, key), locate(section, key));
    }

    double number_or(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? number(section, key) : fallback;
    }

    std::uint64_t unsigned_integer(const std::string& section, const std::string& key) const {
        const std::string t = detail::trim(raw(section, key));
        std::uint64_t v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
            throw ConfigError("config: " + locate(section, key) + ": not a nonnegative integer: '" +
                              t + "'");
        return v;
    }

    // String value; surrounding double quotes are stripped when present.
    std::string text(const std::string& section, const std::string& key) const {
        std::string t = detail::trim(raw(section, key));
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
            return t.substr(1, t.size() - 2);
        return t;
    }

    std::vector<double> number_array(const std::string& section, const std::string& key) const {
        const std::string t = detail::trim(raw(section, key));
        if (t.size() < 2 || t.front() != '[' || t.back() != ']')
            throw ConfigError("config: " + locate(section, key) + ": expected an array [..]");
        std::vector<double> out;
        std::string inner = t.substr(1, t.size() - 2);
        std::size_t start = 0;
        while (start <= inner.size()) {
            const auto comma = inner.find(',', start);
            const std::string item =
                detail::trim(inner.substr(start, comma == std::string::npos ? std::string::npos
                                                                            : comma - start));
            if (!item.empty()) out.push_back(detail::parse_number_token(item, locate(section, key)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    // Resolve a path from the config relative to the config file's directory.
    std::string resolve_path(const std::string& p) const {
        std::filesystem::path fp(p);
        if (fp.is_absolute() || origin_dir_.empty()) return p;
        return (std::filesystem::path(origin_dir_) / fp).string();
    }

private:
    const std::string& raw(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ConfigError("config: missing required key '" + key + "' in [" + section + "]");
        return it->second;
    }

    static std::string locate(const std::string& section, const std::string& key) {
        return "[" + section + "] " + key;
    }

    std::map<std::string, std::string> values_;
    std::string origin_dir_;
};

struct McSettings {
    std::size_t paths;
    double horizon;
    std::uint64_t seed;
};

struct SolverSettings {
    double h = 0.01;
    double u_max = 0.0;  // 0 means automatic: max(40, 12/r, grid end)
    double tolerance = 1e-10;
    std::size_t max_iterations = 100000;
    TailMode tail = TailMode::LundbergClosure;
};

// Everything one CLI run needs, assembled from a config file.
struct RunConfig {
    ModelSpec model;
    double grid_start, grid_stop, grid_step;  // capital grid for the output rows
    SolverSettings solver;
    std::optional<McSettings> mc;  // present only when the config has an [mc] section
    std::size_t mix_samples = 65536;
    std::string output_path;  // may be empty; the --out flag overrides it
};

namespace detail {

inline JumpLaw load_jump_law(const ConfigFile& cfg, const std::string& section) {
    const std::string dist = cfg.text(section, "dist");
    if (dist == "exponential") return JumpLaw::exponential(cfg.number(section, "rate"));
    if (dist == "gamma")
        return JumpLaw::gamma(cfg.number(section, "shape"), cfg.number(section, "rate"));
    if (dist == "pareto")
        return JumpLaw::pareto(cfg.number(section, "scale"), cfg.number(section, "tail_index"));
    if (dist == "empirical") {
        if (cfg.has(section, "sample")) return JumpLaw::empirical(cfg.number_array(section, "sample"));
        if (cfg.has(section, "sample_file")) {
            const std::string path = cfg.resolve_path(cfg.text(section, "sample_file"));
            std::ifstream in(path);
            if (!in) throw ConfigError("config: [" + section + "] cannot open sample file: " + path);
            std::vector<double> xs;
            double x;
            while (in >> x) xs.push_back(x);
            return JumpLaw::empirical(std::move(xs));
        }
        throw ConfigError("config: [" + section + "] empirical law needs 'sample' or 'sample_file'");
    }
    throw ConfigError("config: [" + section +
                      "] dist must be exponential, gamma, pareto or empirical");
}

inline MixingLaw load_mixing(const ConfigFile& cfg) {
    const std::string type = cfg.text("mixing", "type");
    if (type == "degenerate")
        return MixingLaw::degenerate(cfg.number("mixing", "gamma0"), cfg.number("mixing", "delta0"));
    if (type == "discrete") {
        const auto gammas = cfg.number_array("mixing", "gammas");
        const auto deltas = cfg.number_array("mixing", "deltas");
        const auto probs = cfg.number_array("mixing", "probs");
        if (gammas.size() != deltas.size() || gammas.size() != probs.size())
            throw ConfigError("config: [mixing] gammas, deltas and probs must have equal length");
        std::vector<MixingAtom> atoms;
        for (std::size_t i = 0; i < gammas.size(); ++i)
            atoms.push_back(MixingAtom{gammas[i], deltas[i], probs[i]});
        return MixingLaw::discrete(std::move(atoms));
    }
    if (type == "gamma")
        return MixingLaw::independent_gamma(
            cfg.number("mixing", "gamma_shape"), cfg.number("mixing", "gamma_rate"),
            cfg.number("mixing", "delta_shape"), cfg.number("mixing", "delta_rate"));
    throw ConfigError("config: [mixing] type must be degenerate, discrete or gamma");
}

} // namespace detail

inline RunConfig load_run_config(const ConfigFile& cfg) {
    try {
        ModelSpec model(cfg.number("model", "u"), cfg.number("model", "c"),
                        detail::load_jump_law(cfg, "premium_jumps"),
                        detail::load_jump_law(cfg, "claims"), detail::load_mixing(cfg));

        const double grid_start = cfg.number_or("grid", "start", model.u);
        const double grid_stop = cfg.number_or("grid", "stop", model.u);
        const double grid_step = cfg.number_or("grid", "step", 1.0);
        if (!(grid_step > 0.0)) throw ConfigError("config: [grid] step must be positive");
        if (grid_stop < grid_start) throw ConfigError("config: [grid] stop must be >= start");
        if (!(grid_start >= 0.0)) throw ConfigError("config: [grid] start must be nonnegative");

        SolverSettings solver;
        solver.h = cfg.number_or("solver", "h", solver.h);
        solver.u_max = cfg.number_or("solver", "u_max", solver.u_max);
        solver.tolerance = cfg.number_or("solver", "tolerance", solver.tolerance);
        if (cfg.has("solver", "max_iterations"))
            solver.max_iterations =
                static_cast<std::size_t>(cfg.unsigned_integer("solver", "max_iterations"));
        if (cfg.has("solver", "tail")) {
            const std::string tail = cfg.text("solver", "tail");
            if (tail == "lundberg") solver.tail = TailMode::LundbergClosure;
            else if (tail == "zero") solver.tail = TailMode::ZeroClosure;
            else throw ConfigError("config: [solver] tail must be 'lundberg' or 'zero'");
        }

        std::optional<McSettings> mc;
        if (cfg.has("mc", "paths") || cfg.has("mc", "horizon") || cfg.has("mc", "seed")) {
            // Randomness enters only through an explicit seed — no OS-entropy fallback.
            if (!cfg.has("mc", "seed"))
                throw ConfigError("config: [mc] seed is required (no OS-entropy fallback)");
            mc = McSettings{static_cast<std::size_t>(cfg.unsigned_integer("mc", "paths")),
                            cfg.number("mc", "horizon"), cfg.unsigned_integer("mc", "seed")};
        }

        RunConfig rc{std::move(model), grid_start, grid_stop, grid_step, solver, mc, 65536, {}};
        if (cfg.has("mixing", "mix_samples"))
            rc.mix_samples = static_cast<std::size_t>(cfg.unsigned_integer("mixing", "mix_samples"));
        if (cfg.has("output", "path")) rc.output_path = cfg.text("output", "path");
        return rc;
    } catch (const std::invalid_argument& e) {
        // Parameter validation from the domain types, reported as a config problem.
        throw ConfigError(std::string("config: ") + e.what());
    }
}

} // namespace ruinkit
