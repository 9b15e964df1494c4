// runner.hpp: subcommand drivers writing CSV and JSON artifacts

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qpt/config.hpp"
#include "qpt/decoherence.hpp"
#include "qpt/errors.hpp"
#include "qpt/model.hpp"
#include "qpt/oracle.hpp"
#include "qpt/parallel.hpp"
#include "qpt/probe.hpp"
#include "qpt/spectrum.hpp"
#include "qpt/tfim.hpp"

#ifndef QPT_VERSION
#define QPT_VERSION "0.0.0"
#endif

namespace qpt {

inline constexpr const char* version = QPT_VERSION;
inline constexpr std::size_t max_explicit_samples = std::size_t{1} << 24;

struct RunOptions {
    std::optional<std::string> out_dir; // overrides RunConfig::output
    unsigned threads{0};                // 0 = hardware concurrency
    std::ostream* log{&std::cerr};
};

struct RunResult {
    std::vector<std::string> files;
    int exit_code{exit_code::ok};
};

namespace detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Shortest round-trip spelling, used in file names.
inline std::string lambda_tag(double lam) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, lam);
    return std::string(buf, r.ptr);
}

inline std::filesystem::path output_dir(const RunConfig& cfg, const RunOptions& opt) {
    std::filesystem::path dir(opt.out_dir ? *opt.out_dir : cfg.output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw ConfigError("output: cannot create directory '" + dir.string() + "'");
    }
    return dir;
}

class OutputFile {
public:
    OutputFile(const std::filesystem::path& path, RunResult& result) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("output: cannot write '" + path.string() + "'");
        result.files.push_back(path.string());
    }
    std::ofstream& stream() { return out_; }
    void close() {
        out_.close();
        if (!out_) throw ConfigError("output: failed writing '" + path_.string() + "'");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline void csv_header(std::ostream& os, const char* command, const ordered_json& config) {
    os << "# qpt-probe " << version << "\n";
    os << "# command: " << command << "\n";
    os << "# config: " << config.dump() << "\n";
}

inline ordered_json meta(const char* command, const ordered_json& config) {
    return ordered_json{{"tool", "qpt-probe"}, {"version", version}, {"command", command}, {"config", config}};
}

inline void write_json(const std::filesystem::path& path, const ordered_json& j, RunResult& result) {
    OutputFile f(path, result);
    f.stream() << j.dump(2) << "\n";
    f.close();
}

inline ordered_json metrics_record(const ChainParams& p, const std::optional<BroadeningMetrics>& m) {
    ordered_json r;
    r["lambda"] = p.lambda;
    r["w90"] = m ? ordered_json(m->w90) : ordered_json(nullptr);
    r["entropy"] = m ? ordered_json(m->entropy) : ordered_json(nullptr);
    r["participation"] = m ? ordered_json(m->participation) : ordered_json(nullptr);
    r["n"] = p.n_sites;
    r["g_over_b"] = p.g_over_b;
    r["gamma_over_b"] = p.gamma_over_b;
    return r;
}

inline std::optional<BroadeningMetrics> metrics_or_null(const Spectrum& spec) {
    try {
        return broadening_metrics(spec);
    } catch (const DegenerateInputError&) {
        return std::nullopt;
    }
}

} // namespace detail

/// Per-lambda time grids. An "auto" request resolves to the largest t_max
/// and n_samples over the lambda list; each lambda keeps its own carrier.
inline std::vector<TimeGrid> resolve_grids(const RunConfig& cfg, const ProbeState& state, std::ostream* log = nullptr) {
    const auto lambdas = cfg.lambdas();
    std::vector<TimeGrid> grids(lambdas.size());
    double t_max = cfg.grid.t_max;
    std::size_t n_samples = cfg.grid.n_samples;
    if (!cfg.grid.automatic && n_samples > max_explicit_samples) {
        throw CapacityError("time_grid.n_samples exceeds the limit of 2^24");
    }
    bool capped = false;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const ChainParams p = cfg.chain.with_lambda(lambdas[i]);
        const auto table = build_mode_table_for(p, state);
        if (cfg.grid.automatic) {
            const auto est = auto_time_grid(p, table, state);
            grids[i] = est.grid;
            capped = capped || est.capped;
            if (i == 0) {
                t_max = est.grid.t_max;
                n_samples = est.grid.n_samples;
            }
            t_max = std::max(t_max, est.grid.t_max);
            n_samples = std::max(n_samples, est.grid.n_samples);
        } else {
            grids[i].carrier = line_carrier(CorrelationEvaluator(p, table, state));
        }
    }
    for (auto& g : grids) {
        g.t_max = t_max;
        g.n_samples = n_samples;
        g.validate();
    }
    if (capped && log) *log << "warning: auto time grid hit its sample cap; distant lines may alias\n";
    return grids;
}

inline RunResult run_dispersion(const RunConfig& cfg, const RunOptions& opt = {}) {
    RunResult result;
    const auto dir = detail::output_dir(cfg, opt);
    const auto k = momentum_grid(cfg.chain.n_sites);
    for (double lam : cfg.lambdas()) {
        detail::OutputFile f(dir / ("dispersion_lambda_" + detail::lambda_tag(lam) + ".csv"), result);
        auto& os = f.stream();
        ordered_json c = config_to_json(cfg);
        c["lambda"] = lam;
        detail::csv_header(os, "dispersion", c);
        os << "k,epsilon,theta\n";
        for (double km : k) {
            os << detail::fmt(km) << ',' << detail::fmt(dispersion(km, lam)) << ',' << detail::fmt(bogoliubov_angle(km, lam))
               << '\n';
        }
        f.close();
    }
    return result;
}

inline RunResult run_correlation(const RunConfig& cfg, const RunOptions& opt = {}) {
    RunResult result;
    const auto dir = detail::output_dir(cfg, opt);
    const ProbeState state = cfg.probe.build();
    const auto lambdas = cfg.lambdas();
    const auto grids = resolve_grids(cfg, state, opt.log);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const ChainParams p = cfg.chain.with_lambda(lambdas[i]);
        const auto table = build_mode_table_for(p, state);
        const auto series = correlation_series(p, table, state, grids[i], opt.threads);
        detail::OutputFile f(dir / ("correlation_lambda_" + detail::lambda_tag(lambdas[i]) + ".csv"), result);
        auto& os = f.stream();
        ordered_json c = config_to_json(cfg, grids[i]);
        c["lambda"] = lambdas[i];
        detail::csv_header(os, "correlation", c);
        os << "t,re_S,im_S,abs_S\n";
        for (std::size_t j = 0; j < series.values.size(); ++j) {
            const complex v = series.values[j];
            os << detail::fmt(series.time(j)) << ',' << detail::fmt(v.real()) << ',' << detail::fmt(v.imag()) << ','
               << detail::fmt(std::abs(v)) << '\n';
        }
        f.close();
    }
    return result;
}

struct SpectrumRun {
    Spectrum spectrum;
    std::optional<BroadeningMetrics> metrics;
};

inline SpectrumRun compute_spectrum(const ChainParams& p, const ProbeState& state, const TimeGrid& grid,
                                    unsigned threads) {
    const auto table = build_mode_table_for(p, state);
    SpectrumRun r;
    r.spectrum = spectrum_fft(correlation_series(p, table, state, grid, threads));
    r.metrics = detail::metrics_or_null(r.spectrum);
    return r;
}

inline RunResult run_spectrum(const RunConfig& cfg, const RunOptions& opt = {}) {
    RunResult result;
    const auto dir = detail::output_dir(cfg, opt);
    const ProbeState state = cfg.probe.build();
    const auto lambdas = cfg.lambdas();
    const auto grids = resolve_grids(cfg, state, opt.log);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const ChainParams p = cfg.chain.with_lambda(lambdas[i]);
        const auto run = compute_spectrum(p, state, grids[i], opt.threads);
        const std::string tag = detail::lambda_tag(lambdas[i]);
        ordered_json c = config_to_json(cfg, grids[i]);
        c["lambda"] = lambdas[i];
        c["carrier"] = grids[i].carrier;

        detail::OutputFile f(dir / ("spectrum_lambda_" + tag + ".csv"), result);
        auto& os = f.stream();
        detail::csv_header(os, "spectrum", c);
        os << "omega,S\n";
        for (std::size_t j = 0; j < run.spectrum.values.size(); ++j) {
            os << detail::fmt(run.spectrum.frequencies[j]) << ',' << detail::fmt(run.spectrum.values[j]) << '\n';
        }
        f.close();

        ordered_json m = detail::metrics_record(p, run.metrics);
        m["meta"] = detail::meta("spectrum", c);
        detail::write_json(dir / ("metrics_lambda_" + tag + ".json"), m, result);
    }
    return result;
}

inline RunResult run_sweep(const RunConfig& cfg, const RunOptions& opt = {}) {
    if (!cfg.sweep) throw ConfigError("sweep: required for the sweep command");
    RunResult result;
    const auto dir = detail::output_dir(cfg, opt);
    const ProbeState state = cfg.probe.build();
    const auto lambdas = cfg.lambdas();
    const auto grids = resolve_grids(cfg, state, opt.log);

    std::vector<ordered_json> records(lambdas.size());
    parallel_for(lambdas.size(), opt.threads, [&](std::size_t i) {
        const ChainParams p = cfg.chain.with_lambda(lambdas[i]);
        const auto run = compute_spectrum(p, state, grids[i], 1);
        records[i] = detail::metrics_record(p, run.metrics);
    });

    ordered_json c = config_to_json(cfg, grids.front());
    ordered_json doc;
    doc["meta"] = detail::meta("sweep", c);
    doc["records"] = ordered_json::array();
    for (auto& r : records) doc["records"].push_back(std::move(r));
    detail::write_json(dir / "sweep.json", doc, result);
    return result;
}

inline RunResult run_lines(const RunConfig& cfg, const RunOptions& opt = {}) {
    RunResult result;
    const auto dir = detail::output_dir(cfg, opt);
    const ProbeState state = cfg.probe.build();
    for (double lam : cfg.lambdas()) {
        const ChainParams p = cfg.chain.with_lambda(lam);
        const auto table = build_mode_table_for(p, state);
        std::vector<std::pair<int, LineSet>> sets;
        for (int n = 1; n <= state.n_max(); ++n) {
            if (state.branch_weight(n) > 0.0) sets.emplace_back(n, enumerate_lines(table, n, cfg.lines.max_modes, cfg.lines.weight_floor));
        }
        ordered_json c = config_to_json(cfg);
        c["lambda"] = lam;
        c["lines"] = {{"max_modes", cfg.lines.max_modes}, {"weight_floor", cfg.lines.weight_floor}};

        detail::OutputFile f(dir / ("lines_lambda_" + detail::lambda_tag(lam) + ".csv"), result);
        auto& os = f.stream();
        detail::csv_header(os, "lines", c);
        for (const auto& [n, set] : sets) {
            os << "# branch " << n << ": photon weight " << detail::fmt(state.branch_weight(n)) << ", lines " << set.lines.size()
               << ", pruned weight " << detail::fmt(set.pruned_weight) << ", pruned configurations "
               << detail::fmt(set.pruned_configurations) << '\n';
        }
        os << "n,omega,F\n";
        for (const auto& [n, set] : sets) {
            for (const auto& l : set.lines) os << n << ',' << detail::fmt(l.center) << ',' << detail::fmt(l.weight) << '\n';
        }
        f.close();
    }
    return result;
}

struct OracleCase {
    int n_sites;
    double lambda;
    double g_over_b;
    double decoherence_deviation{0.0};
    std::optional<double> ground_energy_deviation;
    std::optional<double> spectrum_deviation;
};

inline constexpr double ground_energy_tolerance = 1e-9;
inline constexpr double spectrum_tolerance = 1e-6;
inline constexpr int max_oracle_spectrum_sites = 8;

/// One oracle comparison: product formula vs dense evolution on every
/// branch up to max_branch, free-fermion vs dense ground energy, and for
/// small chains the line-sum spectrum vs the eigen-overlap spectrum.
inline OracleCase oracle_case(const ChainParams& p, const ProbeState& state, const OracleSuite& suite) {
    OracleCase c{p.n_sites, p.lambda, p.g_over_b, 0.0, std::nullopt, std::nullopt};
    std::vector<double> times(static_cast<std::size_t>(suite.n_times));
    for (std::size_t i = 0; i < times.size(); ++i) {
        times[i] = suite.n_times == 1 ? 0.0 : suite.t_max * static_cast<double>(i) / (suite.n_times - 1);
    }
    const auto table = build_mode_table(p, suite.max_branch);
    for (int n = 1; n <= suite.max_branch; ++n) {
        const auto ref = oracle::oracle_decoherence(p.n_sites, p, n, times);
        const DecoherenceKernel d(table, n, n - 1);
        for (std::size_t i = 0; i < times.size(); ++i) {
            c.decoherence_deviation = std::max(c.decoherence_deviation, std::abs(ref[i] - d(times[i])));
        }
    }
    if (p.lambda >= 0.0) {
        c.ground_energy_deviation = std::abs(oracle::ground_energy(p.n_sites, p.lambda) - free_fermion_ground_energy(p.n_sites, p.lambda));
    }
    if (p.n_sites <= max_oracle_spectrum_sites && p.gamma_over_b > 0.0 && mean_photon_number(state) > 0.0) {
        double reach = 0.0;
        for (int n = 0; n <= state.n_max(); ++n) reach = std::max(reach, 1.0 + std::abs(branch_lambda(p, n)));
        const double w = 2.0 * p.n_sites * reach + 10.0 * p.gamma_over_b;
        std::vector<double> freqs(801);
        for (std::size_t i = 0; i < freqs.size(); ++i) freqs[i] = -w + 2.0 * w * static_cast<double>(i) / 800.0;
        const auto full = build_mode_table_for(p, state);
        const auto ours = spectrum_analytic(p, full, state, freqs, LineOptions{max_enumerable_modes, 0.0});
        const auto ref = oracle::oracle_spectrum(p.n_sites, p, state, freqs);
        c.spectrum_deviation = relative_l2(ours.values, ref.values);
    }
    return c;
}

inline RunResult run_oracle_check(const RunConfig& cfg, const RunOptions& opt = {}) {
    const auto& suite = cfg.oracle;
    for (int n : suite.n_sites) oracle::check_sites(n, oracle::max_dense_sites);
    RunResult result;
    const auto dir = detail::output_dir(cfg, opt);
    const ProbeState state = cfg.probe.build();

    std::vector<ChainParams> params;
    for (int n : suite.n_sites) {
        for (double lam : suite.lambdas) {
            for (double g : suite.couplings) params.push_back(ChainParams{n, lam, g, cfg.chain.gamma_over_b});
        }
    }
    std::vector<OracleCase> cases(params.size());
    parallel_for(params.size(), opt.threads, [&](std::size_t i) { cases[i] = oracle_case(params[i], state, suite); });

    double worst_d = 0.0, worst_e = 0.0, worst_s = 0.0;
    ordered_json list = ordered_json::array();
    auto opt_json = [](const std::optional<double>& x) { return x ? ordered_json(*x) : ordered_json(nullptr); };
    for (const auto& c : cases) {
        worst_d = std::max(worst_d, c.decoherence_deviation);
        if (c.ground_energy_deviation) worst_e = std::max(worst_e, *c.ground_energy_deviation);
        if (c.spectrum_deviation) worst_s = std::max(worst_s, *c.spectrum_deviation);
        list.push_back({{"n_sites", c.n_sites},
                        {"lambda", c.lambda},
                        {"g_over_b", c.g_over_b},
                        {"decoherence_max_abs", c.decoherence_deviation},
                        {"ground_energy_abs", opt_json(c.ground_energy_deviation)},
                        {"spectrum_rel_l2", opt_json(c.spectrum_deviation)}});
    }
    const bool passed = worst_d < suite.tolerance && worst_e < ground_energy_tolerance && worst_s < spectrum_tolerance;

    ordered_json c = config_to_json(cfg);
    c["oracle_check"] = {{"n_sites", suite.n_sites},   {"lambda", suite.lambdas},      {"g_over_b", suite.couplings},
                         {"n_times", suite.n_times},   {"t_max", suite.t_max},         {"tolerance", suite.tolerance},
                         {"max_branch", suite.max_branch}};
    ordered_json doc;
    doc["meta"] = detail::meta("oracle-check", c);
    doc["tolerances"] = {{"decoherence", suite.tolerance}, {"ground_energy", ground_energy_tolerance}, {"spectrum", spectrum_tolerance}};
    doc["max_deviation"] = {{"decoherence", worst_d}, {"ground_energy", worst_e}, {"spectrum", worst_s}};
    doc["passed"] = passed;
    doc["cases"] = std::move(list);
    detail::write_json(dir / "oracle_check.json", doc, result);
    if (!passed) {
        if (opt.log) *opt.log << "oracle-check: deviation above tolerance\n";
        result.exit_code = exit_code::oracle_deviation;
    }
    return result;
}

inline RunResult run_params(const RunConfig& cfg, const RunOptions& opt = {}) {
    RunResult result;
    const auto dir = detail::output_dir(cfg, opt);
    const auto d = derive_chain_params(cfg.physical, cfg.chain.n_sites, cfg.gamma_ghz);
    for (const auto& w : d.warnings) {
        if (opt.log) *opt.log << "warning: " << w << '\n';
    }
    const auto& ph = cfg.physical;
    ordered_json physical = {{"e_j", ph.e_j},
                             {"c_sigma", ph.c_sigma},
                             {"c_m", ph.c_m},
                             {"tlr_length", ph.tlr_length},
                             {"squid_area", ph.squid_area},
                             {"distance", ph.distance},
                             {"inductance_per_length", ph.inductance_per_length},
                             {"omega", ph.omega},
                             {"flux_bias", ph.flux_bias},
                             {"gamma", cfg.gamma_ghz}};
    ordered_json c{{"chain", {{"n_sites", cfg.chain.n_sites}}}, {"physical", physical}};
    ordered_json doc;
    doc["meta"] = detail::meta("params", c);
    doc["derived"] = {{"b_ghz", d.b_ghz},
                      {"b_x_ghz", d.b_x_ghz},
                      {"eta", d.eta},
                      {"g_ghz", d.g_ghz},
                      {"nominal_b_ghz", d.nominal_b_ghz},
                      {"b_ratio_to_nominal", d.b_ratio_to_nominal}};
    doc["chain"] = {{"n_sites", d.chain.n_sites},
                    {"lambda", d.chain.lambda},
                    {"g_over_b", d.chain.g_over_b},
                    {"gamma_over_b", d.chain.gamma_over_b}};
    doc["warnings"] = d.warnings;
    detail::write_json(dir / "params.json", doc, result);
    return result;
}

} // namespace qpt
