#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/forcing.hpp"
#include "nehari/output.hpp"
#include "nehari/partition.hpp"
#include "nehari/reaction.hpp"
#include "nehari/signed_minimizer.hpp"

namespace nehari {

// Sectioned key = value configuration:
//
//   # comment
//   [problem]
//   reaction = atan
//
//   [forcing]
//   constant = 0.3
//   cos = 1:0.5        # omega:amplitude tokens
//
// Keys live under the most recent [section] header. Values keep everything
// after '=' up to an unquoted '#', trimmed.
class Config {
  public:
    static Config parse_text(const std::string& text) {
        Config c;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string s = trim(line);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']' || s.size() < 3)
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": malformed section header '" + s + "'");
                section = trim(s.substr(1, s.size() - 2));
                c.data_[section];
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + s + "'");
            const std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": key '" + key + "' appears before any [section]");
            c.data_[section][key] = value;
        }
        return c;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file '" + path + "'");
        std::ostringstream os;
        os << in.rdbuf();
        return parse_text(os.str());
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = data_.find(section);
        return s != data_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        const auto s = data_.find(section);
        if (s == data_.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    std::string require(const std::string& section, const std::string& key) const {
        if (!has(section, key))
            throw ConfigError("config: missing required key [" + section + "] " + key);
        return data_.at(section).at(key);
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        return to_double(section, key, data_.at(section).at(key));
    }

    double require_double(const std::string& section, const std::string& key) const {
        return to_double(section, key, require(section, key));
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const {
        if (!has(section, key)) return fallback;
        const double v = to_double(section, key, data_.at(section).at(key));
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ConfigError("config: [" + section + "] " + key + " must be an integer");
        return i;
    }

    int require_int(const std::string& section, const std::string& key) const {
        if (!has(section, key))
            throw ConfigError("config: missing required key [" + section + "] " + key);
        return get_int(section, key, 0);
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = data_.at(section).at(key);
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        throw ConfigError("config: [" + section + "] " + key + " must be a boolean, got '" + v + "'");
    }

    std::vector<double> get_list(const std::string& section, const std::string& key) const {
        std::vector<double> out;
        if (!has(section, key)) return out;
        std::istringstream in(data_.at(section).at(key));
        std::string tok;
        while (in >> tok) out.push_back(to_double(section, key, tok));
        return out;
    }

    // omega:amplitude tokens, e.g. "1:0.5 2:-0.1"
    std::vector<TrigTerm> get_trig(const std::string& section, const std::string& key) const {
        std::vector<TrigTerm> out;
        if (!has(section, key)) return out;
        std::istringstream in(data_.at(section).at(key));
        std::string tok;
        while (in >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw ConfigError("config: [" + section + "] " + key +
                                  " expects omega:amplitude tokens, got '" + tok + "'");
            TrigTerm t;
            t.omega = to_double(section, key, tok.substr(0, colon));
            t.amp = to_double(section, key, tok.substr(colon + 1));
            out.push_back(t);
        }
        return out;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        data_[section][key] = value;
    }

    // Sorted flat rendering; the artifact hash is computed from this, so it is
    // insensitive to key order and comments in the source file.
    std::string canonical() const {
        std::ostringstream os;
        for (const auto& [sec, kv] : data_)
            for (const auto& [k, v] : kv) os << sec << '.' << k << '=' << v << '\n';
        return os.str();
    }

    std::uint64_t hash() const { return fnv1a64(canonical()); }

  private:
    std::map<std::string, std::map<std::string, std::string>> data_;

    static std::string trim(const std::string& s) {
        std::size_t lo = 0, hi = s.size();
        while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
        while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
        return s.substr(lo, hi - lo);
    }

    static double to_double(const std::string& section, const std::string& key,
                            const std::string& v) {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw ConfigError("config: [" + section + "] " + key + " is not a number: '" + v + "'");
        return x;
    }
};

inline ReactionTerm reaction_from(const Config& c) {
    const std::string name = c.get("problem", "reaction", "atan");
    return make_reaction(name, c.get_double("problem", "reaction_amp", 1.0),
                         c.get_double("problem", "reaction_rate", 1.0));
}

inline ForcingTerm forcing_from(const Config& c) {
    return make_trig_forcing(c.get_double("forcing", "constant", 0.0),
                             c.get_trig("forcing", "cos"), c.get_trig("forcing", "sin"));
}

inline SolverOptions solver_options_from(const Config& c) {
    SolverOptions o;
    o.h_target = c.get_double("solver", "h", o.h_target);
    o.tol = c.get_double("solver", "tol", o.tol);
    o.max_iter = c.get_int("solver", "max_iter", o.max_iter);
    o.min_length = c.get_double("solver", "min_length", o.min_length);
    o.n_starts = c.get_int("solver", "n_starts", o.n_starts);
    o.seed = static_cast<std::uint64_t>(c.get_int("solver", "seed", static_cast<int>(o.seed)));
    o.compute_eigenvalue = c.get_bool("solver", "eigenvalue", o.compute_eigenvalue);
    return o;
}

inline Sign sign_from(const Config& c, const std::string& section, const std::string& key) {
    const std::string s = c.get(section, key, "+");
    if (s == "+" || s == "plus") return Sign::plus;
    if (s == "-" || s == "minus") return Sign::minus;
    throw ConfigError("config: [" + section + "] " + key + " must be + or -, got '" + s + "'");
}

inline PartitionOptions partition_options_from(const Config& c) {
    PartitionOptions o;
    o.inner = solver_options_from(c);
    o.L = c.get_double("partition", "L", o.L);
    o.H = c.get_double("partition", "H", o.H);
    o.tol = c.get_double("partition", "tol", o.tol);
    o.mismatch_tol = c.get_double("partition", "mismatch_tol", o.mismatch_tol);
    o.slope_gap_tol = c.get_double("partition", "slope_gap_tol", o.slope_gap_tol);
    o.max_outer_iter = c.get_int("partition", "max_outer_iter", o.max_outer_iter);
    o.random_probes = c.get_int("partition", "probes", o.random_probes);
    o.seed = static_cast<std::uint64_t>(
        c.get_int("partition", "seed", static_cast<int>(o.seed)));
    o.workers = c.get_int("partition", "workers", o.workers);
    return o;
}

} // namespace nehari
