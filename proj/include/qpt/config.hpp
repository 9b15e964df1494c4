// config.hpp: JSON run configuration for the qpt-probe tool

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qpt/errors.hpp"
#include "qpt/model.hpp"
#include "qpt/probe.hpp"
#include "qpt/spectrum.hpp"

namespace qpt {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct ProbeSpec {
    enum class Kind { fock, coherent };
    Kind kind{Kind::fock};
    std::vector<std::complex<double>> coefficients{{1.0, 0.0}, {1.0, 0.0}};
    std::complex<double> alpha{1.0, 0.0};
    double tail_tol{1e-12};

    [[nodiscard]] ProbeState build() const {
        return kind == Kind::fock ? fock_superposition(coefficients) : coherent_state(alpha, tail_tol);
    }
};

struct GridSpec {
    bool automatic{true};
    double t_max{0.0};
    std::size_t n_samples{0};
};

struct OracleSuite {
    std::vector<int> n_sites{2, 4, 6, 8};
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    std::vector<double> couplings{0.05, 0.1};
    int n_times{50};
    double t_max{20.0};
    double tolerance{1e-8};
    int max_branch{2};
};

struct RunConfig {
    ChainParams chain{};
    ProbeSpec probe{};
    GridSpec grid{};
    std::optional<std::vector<double>> sweep;
    std::string output{"."};
    LineOptions lines{};
    OracleSuite oracle{};
    PhysicalParams physical{};
    double gamma_ghz{0.0};

    /// The sweep list if present, else the single chain lambda.
    [[nodiscard]] std::vector<double> lambdas() const { return sweep ? *sweep : std::vector<double>{chain.lambda}; }
};

namespace detail {

class Validator {
public:
    void fail(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }

    void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, _] : obj.items()) {
            if (!ok.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
        }
    }

    std::optional<double> number(const json& obj, const char* key, const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            fail(path + "." + key, "expected a number");
            return std::nullopt;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            fail(path + "." + key, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<double> non_negative(const json& obj, const char* key, const std::string& path) {
        auto x = number(obj, key, path);
        if (x && *x < 0.0) {
            fail(path + "." + key, "must be non-negative");
            return std::nullopt;
        }
        return x;
    }

    std::optional<double> positive(const json& obj, const char* key, const std::string& path) {
        auto x = number(obj, key, path);
        if (x && !(*x > 0.0)) {
            fail(path + "." + key, "must be positive");
            return std::nullopt;
        }
        return x;
    }

    std::optional<long long> integer(const json& obj, const char* key, const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(path + "." + key, "expected an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<std::complex<double>> complex_value(const json& v, const std::string& path) {
        if (v.is_number()) {
            const double re = v.get<double>();
            if (std::isfinite(re)) return std::complex<double>{re, 0.0};
        } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            const double re = v[0].get<double>(), im = v[1].get<double>();
            if (std::isfinite(re) && std::isfinite(im)) return std::complex<double>{re, im};
        }
        fail(path, "expected a finite number or a [re, im] pair");
        return std::nullopt;
    }

    template <class T>
    std::optional<std::vector<T>> number_list(const json& obj, const char* key, const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        const std::string p = path.empty() ? key : path + "." + key;
        if (!v.is_array()) {
            fail(p, "expected an array");
            return std::nullopt;
        }
        std::vector<T> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const bool ok = std::is_integral_v<T> ? v[i].is_number_integer() : v[i].is_number();
            if (!ok || !std::isfinite(v[i].get<double>())) {
                fail(p + "[" + std::to_string(i) + "]", std::is_integral_v<T> ? "expected an integer" : "expected a finite number");
                continue;
            }
            out.push_back(v[i].get<T>());
        }
        return out;
    }

    void raise() const {
        if (errors_.empty()) return;
        std::ostringstream msg;
        msg << "invalid configuration:";
        for (const auto& e : errors_) msg << "\n  " << e;
        throw ConfigError(msg.str());
    }

private:
    std::vector<std::string> errors_;
};

} // namespace detail

/// Parses and validates a configuration document. All violations are
/// collected and reported together, each prefixed with its field path.
inline RunConfig parse_config(const json& doc) {
    detail::Validator v;
    RunConfig cfg;
    if (!doc.is_object()) throw ConfigError("invalid configuration: top level must be a JSON object");
    v.check_keys(doc, "", {"chain", "probe", "time_grid", "sweep", "output", "lines", "oracle_check", "physical"});

    if (doc.contains("chain")) {
        const auto& c = doc["chain"];
        if (!c.is_object()) {
            v.fail("chain", "expected an object");
        } else {
            v.check_keys(c, "chain", {"n_sites", "lambda", "g_over_b", "gamma_over_b"});
            if (auto n = v.integer(c, "n_sites", "chain")) {
                if (*n < 2 || *n % 2 != 0 || *n > 100'000'000) v.fail("chain.n_sites", "must be an even integer >= 2");
                else cfg.chain.n_sites = static_cast<int>(*n);
            }
            if (auto x = v.non_negative(c, "lambda", "chain")) cfg.chain.lambda = *x;
            if (auto x = v.non_negative(c, "g_over_b", "chain")) cfg.chain.g_over_b = *x;
            if (auto x = v.non_negative(c, "gamma_over_b", "chain")) cfg.chain.gamma_over_b = *x;
        }
    }

    if (doc.contains("probe")) {
        const auto& p = doc["probe"];
        const std::string type = p.is_object() && p.contains("type") && p["type"].is_string() ? p["type"].get<std::string>() : "";
        if (!p.is_object()) {
            v.fail("probe", "expected an object");
        } else if (type == "fock") {
            v.check_keys(p, "probe", {"type", "coefficients"});
            cfg.probe.kind = ProbeSpec::Kind::fock;
            if (!p.contains("coefficients") || !p["coefficients"].is_array() || p["coefficients"].empty()) {
                v.fail("probe.coefficients", "expected a non-empty array");
            } else {
                cfg.probe.coefficients.clear();
                double norm = 0.0;
                for (std::size_t i = 0; i < p["coefficients"].size(); ++i) {
                    if (auto z = v.complex_value(p["coefficients"][i], "probe.coefficients[" + std::to_string(i) + "]")) {
                        cfg.probe.coefficients.push_back(*z);
                        norm += std::norm(*z);
                    }
                }
                if (norm == 0.0 && cfg.probe.coefficients.size() == p["coefficients"].size()) {
                    v.fail("probe.coefficients", "all coefficients are zero");
                }
            }
        } else if (type == "coherent") {
            v.check_keys(p, "probe", {"type", "alpha", "tail_tol"});
            cfg.probe.kind = ProbeSpec::Kind::coherent;
            if (!p.contains("alpha")) v.fail("probe.alpha", "required for a coherent probe");
            else if (auto z = v.complex_value(p["alpha"], "probe.alpha")) cfg.probe.alpha = *z;
            if (auto t = v.number(p, "tail_tol", "probe")) {
                if (!(*t > 0.0 && *t < 1.0)) v.fail("probe.tail_tol", "must lie in (0, 1)");
                else cfg.probe.tail_tol = *t;
            }
        } else {
            v.fail("probe.type", "expected \"fock\" or \"coherent\"");
        }
    }

    if (doc.contains("time_grid")) {
        const auto& g = doc["time_grid"];
        if (g.is_string() && g.get<std::string>() == "auto") {
            cfg.grid.automatic = true;
        } else if (g.is_object()) {
            v.check_keys(g, "time_grid", {"t_max", "n_samples"});
            cfg.grid.automatic = false;
            if (auto t = v.positive(g, "t_max", "time_grid")) cfg.grid.t_max = *t;
            else if (!g.contains("t_max")) v.fail("time_grid.t_max", "required");
            if (auto n = v.integer(g, "n_samples", "time_grid")) {
                if (*n < 2 || (*n & (*n - 1)) != 0) v.fail("time_grid.n_samples", "must be a power of two >= 2");
                else cfg.grid.n_samples = static_cast<std::size_t>(*n);
            } else if (!g.contains("n_samples")) {
                v.fail("time_grid.n_samples", "required");
            }
        } else {
            v.fail("time_grid", "expected \"auto\" or {\"t_max\", \"n_samples\"}");
        }
    }

    if (doc.contains("sweep")) {
        if (auto s = v.number_list<double>(doc, "sweep", "")) {
            if (s->empty()) v.fail("sweep", "must list at least one lambda");
            for (std::size_t i = 0; i < s->size(); ++i) {
                if ((*s)[i] < 0.0) v.fail("sweep[" + std::to_string(i) + "]", "must be non-negative");
            }
            cfg.sweep = std::move(*s);
        }
    }

    if (doc.contains("output")) {
        if (!doc["output"].is_string() || doc["output"].get<std::string>().empty()) v.fail("output", "expected a directory path");
        else cfg.output = doc["output"].get<std::string>();
    }

    if (doc.contains("lines")) {
        const auto& l = doc["lines"];
        if (!l.is_object()) {
            v.fail("lines", "expected an object");
        } else {
            v.check_keys(l, "lines", {"max_modes", "weight_floor"});
            if (auto m = v.integer(l, "max_modes", "lines")) {
                if (*m < 1 || *m > max_enumerable_modes) {
                    v.fail("lines.max_modes", "must lie in [1, " + std::to_string(max_enumerable_modes) + "]");
                } else {
                    cfg.lines.max_modes = static_cast<int>(*m);
                }
            }
            if (auto f = v.non_negative(l, "weight_floor", "lines")) cfg.lines.weight_floor = *f;
        }
    }

    if (doc.contains("oracle_check")) {
        const auto& o = doc["oracle_check"];
        if (!o.is_object()) {
            v.fail("oracle_check", "expected an object");
        } else {
            v.check_keys(o, "oracle_check", {"n_sites", "lambda", "g_over_b", "n_times", "t_max", "tolerance", "max_branch"});
            if (auto n = v.number_list<int>(o, "n_sites", "oracle_check")) {
                for (std::size_t i = 0; i < n->size(); ++i) {
                    if ((*n)[i] < 2 || (*n)[i] % 2 != 0) v.fail("oracle_check.n_sites[" + std::to_string(i) + "]", "must be an even integer >= 2");
                }
                cfg.oracle.n_sites = *n;
            }
            if (auto l = v.number_list<double>(o, "lambda", "oracle_check")) cfg.oracle.lambdas = *l;
            if (auto g = v.number_list<double>(o, "g_over_b", "oracle_check")) cfg.oracle.couplings = *g;
            if (auto n = v.integer(o, "n_times", "oracle_check")) {
                if (*n < 1) v.fail("oracle_check.n_times", "must be >= 1");
                else cfg.oracle.n_times = static_cast<int>(*n);
            }
            if (auto t = v.non_negative(o, "t_max", "oracle_check")) cfg.oracle.t_max = *t;
            if (auto t = v.positive(o, "tolerance", "oracle_check")) cfg.oracle.tolerance = *t;
            if (auto b = v.integer(o, "max_branch", "oracle_check")) {
                if (*b < 1) v.fail("oracle_check.max_branch", "must be >= 1");
                else cfg.oracle.max_branch = static_cast<int>(*b);
            }
            if (cfg.oracle.n_sites.empty() || cfg.oracle.lambdas.empty() || cfg.oracle.couplings.empty()) {
                v.fail("oracle_check", "n_sites, lambda and g_over_b lists must be non-empty");
            }
        }
    }

    if (doc.contains("physical")) {
        const auto& p = doc["physical"];
        if (!p.is_object()) {
            v.fail("physical", "expected an object");
        } else {
            v.check_keys(p, "physical", {"e_j", "c_sigma", "c_m", "tlr_length", "squid_area", "distance",
                                         "inductance_per_length", "omega", "flux_bias", "gamma"});
            auto& ph = cfg.physical;
            const struct {
                const char* key;
                double* field;
            } fields[] = {{"e_j", &ph.e_j},
                          {"c_sigma", &ph.c_sigma},
                          {"c_m", &ph.c_m},
                          {"tlr_length", &ph.tlr_length},
                          {"squid_area", &ph.squid_area},
                          {"distance", &ph.distance},
                          {"inductance_per_length", &ph.inductance_per_length},
                          {"omega", &ph.omega}};
            for (const auto& f : fields) {
                if (auto x = v.positive(p, f.key, "physical")) *f.field = *x;
            }
            if (auto x = v.non_negative(p, "flux_bias", "physical")) {
                if (*x > 0.5) v.fail("physical.flux_bias", "must lie in [0, 1/2]");
                else ph.flux_bias = *x;
            }
            if (auto x = v.non_negative(p, "gamma", "physical")) cfg.gamma_ghz = *x;
        }
    }

    v.raise();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

inline ordered_json complex_to_json(std::complex<double> z) { return ordered_json::array({z.real(), z.imag()}); }

/// Canonical echo of a configuration, with the time grid as resolved.
inline ordered_json config_to_json(const RunConfig& cfg, const std::optional<TimeGrid>& resolved = std::nullopt) {
    ordered_json j;
    j["chain"] = {{"n_sites", cfg.chain.n_sites},
                  {"lambda", cfg.chain.lambda},
                  {"g_over_b", cfg.chain.g_over_b},
                  {"gamma_over_b", cfg.chain.gamma_over_b}};
    ordered_json probe;
    if (cfg.probe.kind == ProbeSpec::Kind::fock) {
        probe["type"] = "fock";
        probe["coefficients"] = ordered_json::array();
        for (const auto& c : cfg.probe.coefficients) probe["coefficients"].push_back(complex_to_json(c));
    } else {
        probe["type"] = "coherent";
        probe["alpha"] = complex_to_json(cfg.probe.alpha);
        probe["tail_tol"] = cfg.probe.tail_tol;
    }
    j["probe"] = probe;
    if (resolved) {
        j["time_grid"] = {{"mode", cfg.grid.automatic ? "auto" : "explicit"},
                          {"t_max", resolved->t_max},
                          {"n_samples", resolved->n_samples}};
    } else if (cfg.grid.automatic) {
        j["time_grid"] = "auto";
    } else {
        j["time_grid"] = {{"t_max", cfg.grid.t_max}, {"n_samples", cfg.grid.n_samples}};
    }
    if (cfg.sweep) j["sweep"] = *cfg.sweep;
    j["output"] = cfg.output;
    return j;
}

} // namespace qpt
