// INI-style sweep configuration ([section] + key = value)

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>

#include "qbattery/sweep.hpp"

namespace qbattery {

// Settings read from a config file, before command-line overrides.
struct ConfigValues {
    std::map<std::string, std::string> entries;  // "section.key" -> raw value

    const std::string* find(const std::string& path) const {
        const auto it = entries.find(path);
        return it == entries.end() ? nullptr : &it->second;
    }
};

inline const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys{
        "run.workers", "run.out",   "run.format",   "run.brute",   "run.max",     "noise.kind",
        "noise.p",     "noise.n",   "model.h0",     "model.j",     "model.jz",    "model.gamma",
        "model.d",     "model.omega", "model.t",    "model.omega_t", "verify.draws", "verify.seed",
    };
    return keys;
}

inline ConfigValues read_config(std::istream& in, const std::string& source) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw SpecError(source, e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    ConfigValues cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw SpecError(section, "keys must live inside a [section]");
        for (const auto& [key, value] : body) {
            const std::string path = section + "." + key;
            if (!config_keys().count(path)) throw SpecError(path, "unknown config key");
            cfg.entries[path] = value.data();
        }
    }
    return cfg;
}

inline ConfigValues read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("--config", "cannot open '" + path + "'");
    return read_config(in, path);
}

namespace detail {
inline bool parse_bool(const std::string& s, const std::string& field) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw SpecError(field, "expected true or false, got '" + s + "'");
}

inline std::uint64_t parse_count(const std::string& s, const std::string& field) {
    std::uint64_t v{};
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw SpecError(field, "expected a non-negative integer, got '" + s + "'");
    }
    return v;
}
}  // namespace detail

// Applies every setting present in cfg to spec; absent keys leave spec
// untouched.
inline void apply_config(const ConfigValues& cfg, SweepSpec& spec) {
    for (const auto& [path, raw] : cfg.entries) {
        const std::string value{detail::trim(raw)};
        if (path == "run.workers") {
            spec.workers = static_cast<unsigned>(detail::parse_count(value, path));
        } else if (path == "run.out") {
            spec.out = value;
        } else if (path == "run.format") {
            const auto f = parse_output_format(value);
            if (!f) throw SpecError(path, "expected csv or jsonl");
            spec.format = *f;
        } else if (path == "run.brute") {
            spec.brute = detail::parse_bool(value, path);
        } else if (path == "run.max") {
            spec.max_only = detail::parse_bool(value, path);
        } else if (path == "noise.kind") {
            const auto k = parse_noise_kind(value);
            if (!k) throw SpecError(path, "expected pf, bf or ad");
            spec.noise = *k;
        } else if (path == "verify.draws") {
            spec.draws = detail::parse_count(value, path);
        } else if (path == "verify.seed") {
            spec.seed = detail::parse_count(value, path);
        } else {
            // noise.p, noise.n, model.*: grids
            static const std::map<std::string, std::string> names{
                {"noise.p", "p"},       {"noise.n", "n"},       {"model.h0", "h0"},
                {"model.j", "J"},       {"model.jz", "Jz"},     {"model.gamma", "gamma"},
                {"model.d", "D"},       {"model.omega", "omega"}, {"model.t", "t"},
                {"model.omega_t", "omega_t"},
            };
            detail::field(spec.params, names.at(path)) = parse_grid(value, path);
        }
    }
}

}  // namespace qbattery
