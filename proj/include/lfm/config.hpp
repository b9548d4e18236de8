#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lfm/cells.hpp"
#include "lfm/constants.hpp"
#include "lfm/errors.hpp"
#include "lfm/linear_model.hpp"

namespace lfm {

// Plain hierarchical key-value text: one `dotted.key = value` per line, `#`
// comments. Complex numbers are "re,im" pairs; log-space quantities carry a
// `_log` suffix and are printed verbatim to avoid silent underflow.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text) {
        KeyValueConfig cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigInvalid("config line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(t.substr(0, eq));
            std::string val = trim(t.substr(eq + 1));
            if (key.empty()) throw ConfigInvalid("config line " + std::to_string(lineno) + ": empty key");
            if (!cfg.values_.count(key)) cfg.order_.push_back(key);
            cfg.values_[key] = val;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt = "") const {
        auto it = values_.find(key);
        return it == values_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = values_.find(key);
        if (it == values_.end()) return dflt;
        try {
            return std::stod(it->second);
        } catch (...) {
            throw ConfigInvalid("config key '" + key + "': not a number: " + it->second);
        }
    }

    long long get_int(const std::string& key, long long dflt) const {
        auto it = values_.find(key);
        if (it == values_.end()) return dflt;
        try {
            return std::stoll(it->second);
        } catch (...) {
            throw ConfigInvalid("config key '" + key + "': not an integer: " + it->second);
        }
    }

    std::vector<double> get_doubles(const std::string& key) const {
        std::vector<double> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        std::istringstream in(it->second);
        std::string tok;
        while (in >> tok) {
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                throw ConfigInvalid("config key '" + key + "': bad number: " + tok);
            }
        }
        return out;
    }

    std::vector<cplx> get_complexes(const std::string& key) const {
        std::vector<cplx> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        std::istringstream in(it->second);
        std::string tok;
        while (in >> tok) {
            auto comma = tok.find(',');
            if (comma == std::string::npos)
                throw ConfigInvalid("config key '" + key + "': complex values are re,im pairs");
            try {
                out.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
            } catch (...) {
                throw ConfigInvalid("config key '" + key + "': bad complex: " + tok);
            }
        }
        return out;
    }

    std::vector<std::string> get_strings(const std::string& key) const {
        std::vector<std::string> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        std::istringstream in(it->second);
        std::string tok;
        while (in >> tok) out.push_back(tok);
        return out;
    }

    // canonical text: sorted keys, single spacing; the hash input
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values_) {
            out += k;
            out += " = ";
            out += v;
            out += '\n';
        }
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

inline std::uint64_t fnv1a_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Validated experiment setup: field, constants, lattice, run selection.
struct ExperimentConfig {
    KeyValueConfig raw;
    LinearVectorField field;
    PaperConstants constants;
    SigmaLattice lattice = SigmaLattice{-30.0, 1e-4, 300000, 628319};
    std::vector<std::string> ops;
    int samples = 256;
    int rotations = 16;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    double scale_R = 1.0;
    double scale_lambda = 1.0;

    static ExperimentConfig from_text(const std::string& text) {
        ExperimentConfig c;
        c.raw = KeyValueConfig::parse(text);
        auto lambdas = c.raw.get_complexes("field.lambdas");
        if (lambdas.empty()) lambdas = {cplx(1.0, 0.0), cplx(1.0, 0.0)};
        c.field = normalize(LinearVectorField::make(std::move(lambdas)));

        c.scale_R = c.raw.get_double("run.scale_R", 1.0);
        c.scale_lambda = c.raw.get_double("run.scale_lambda", 1.0);
        double lam = c.raw.get_double("constants.lambda", std::max(1.0, c.field.lambda_star)) *
                     c.scale_lambda;
        double R = c.raw.get_double("constants.R", 1.0) * c.scale_R;
        if (lam < c.field.lambda_star) lam = c.field.lambda_star;
        c.constants = PaperConstants::derive(
            lam, R, c.raw.get_double("constants.c1", 1.2),
            static_cast<int>(c.raw.get_int("constants.m0", 12)),
            static_cast<int>(c.raw.get_int("constants.m1", 144)),
            c.raw.get_double("constants.hbar", 1e-4), c.raw.get_double("constants.eps0", 0.15),
            c.raw.get_double("constants.eps1", 0.01), c.raw.get_double("constants.kappa", 2.0),
            c.raw.get_double("constants.t", 0.0));

        if (c.raw.has("lattice.r_min_log"))
            c.lattice = SigmaLattice::make(
                c.raw.get_double("lattice.r_min_log", -30.0),
                c.raw.get_double("lattice.growth_log", 1e-4), c.raw.get_int("lattice.n_rings", 300000),
                c.raw.get_int("lattice.n_rays", 628319));

        c.ops = c.raw.get_strings("run.ops");
        c.samples = static_cast<int>(c.raw.get_int("run.samples", 256));
        c.rotations = static_cast<int>(c.raw.get_int("run.rotations", 16));
        c.seed = static_cast<std::uint64_t>(c.raw.get_int("run.seed", 1));
        c.out_dir = c.raw.get_string("run.out", ".");
        if (c.samples < 64) throw ConfigInvalid("run.samples must be >= 64");
        if (c.rotations < 16) throw ConfigInvalid("run.rotations must be >= 16");
        return c;
    }

    std::uint64_t hash() const { return fnv1a_hash(raw.canonical()); }
};

} // namespace lfm
