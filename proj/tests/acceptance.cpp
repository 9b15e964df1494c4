// acceptance.cpp: one pass/fail line per acceptance criterion

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qpt/config.hpp"
#include "qpt/decoherence.hpp"
#include "qpt/oracle.hpp"
#include "qpt/runner.hpp"
#include "qpt/spectrum.hpp"

using namespace qpt;
using cd = std::complex<double>;
using clock_type = std::chrono::steady_clock;

namespace {

// Reference device: g = 0.13 GHz, Gamma = 6.3 MHz, B = 1.6 GHz.
constexpr int device_sites = 1000;
constexpr double device_g = 0.08125;
constexpr double device_gamma = 0.0039;
const std::vector<double> sweep_lambdas{0.25, 0.5, 1.0, 2.0, 5.0, 100.0};

// Pilot run of criterion 5 gave w90(1) / w90(100) = 398.6; the floor keeps 10% headroom.
constexpr double w90_ratio_floor = 358.0;

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ProbeState zero_one() {
    const cd c[] = {{1.0, 0.0}, {1.0, 0.0}};
    return fock_superposition(c);
}

ProbeState coherent_one() { return coherent_state({1.0, 0.0}, 1e-12); }

ChainParams device(double lam, int n_sites = device_sites) { return ChainParams{n_sites, lam, device_g, device_gamma}; }

/// Common auto grid over several (params, state) runs: largest t_max and
/// n_samples, per-run carrier.
std::vector<TimeGrid> common_grids(const std::vector<ChainParams>& params, const std::vector<ProbeState>& states) {
    std::vector<TimeGrid> grids;
    double t_max = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto est = auto_time_grid(params[i], build_mode_table_for(params[i], states[i]), states[i]);
        grids.push_back(est.grid);
        t_max = std::max(t_max, est.grid.t_max);
        n = std::max(n, est.grid.n_samples);
    }
    for (auto& g : grids) {
        g.t_max = t_max;
        g.n_samples = n;
    }
    return grids;
}

void criterion_oracle_equivalence() {
    const auto start = clock_type::now();
    std::vector<double> times(50);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = 20.0 * static_cast<double>(i) / 49.0;
    double worst = 0.0;
    for (int n_sites : {2, 4, 6, 8, 10}) {
        for (double lam : {0.5, 1.0, 2.0}) {
            for (double g : {0.05, 0.1}) {
                const ChainParams p{n_sites, lam, g, 0.0};
                const auto table = build_mode_table(p, 2);
                for (int n = 1; n <= 2; ++n) {
                    const auto ref = oracle::oracle_decoherence(n_sites, p, n, times);
                    const DecoherenceKernel d(table, n, n - 1);
                    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, std::abs(ref[i] - d(times[i])));
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    report(1, worst < 1e-8 && elapsed < 60.0, "oracle equivalence",
           fmt("max |D_product - D_ED| = %.3g (tol 1e-8)", worst) + fmt(", %.1f s (limit 60 s)", elapsed));
}

void criterion_sum_rules() {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> lam(0.0, 5.0), g(0.0, 0.3), k(1e-6, std::numbers::pi - 1e-6);
    std::uniform_int_distribution<int> branch(1, 50);
    double coeff = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const ChainParams p{8, lam(rng), g(rng), 0.0};
        const int n = branch(rng);
        const double kk = k(rng);
        const double th = bogoliubov_angle(kk, p.lambda);
        const double an = 0.5 * (bogoliubov_angle(kk, branch_lambda(p, n)) - th);
        const double ap = 0.5 * (bogoliubov_angle(kk, branch_lambda(p, n - 1)) - th);
        coeff = std::max(coeff, std::abs(mode_coefficients(an, ap).sum() - 1.0));
    }
    double lines = 0.0;
    for (int n_sites : {2, 4, 6, 8}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto table = build_mode_table(ChainParams{n_sites, lam(rng), g(rng), 0.0}, 3);
            for (int n = 1; n <= 3; ++n) {
                const auto set = enumerate_lines(table, n, max_enumerable_modes, 0.0);
                double total = 0.0;
                for (const auto& l : set.lines) total += l.weight;
                lines = std::max(lines, std::abs(total - 1.0));
            }
        }
    }
    double s0 = 0.0;
    for (const ProbeState& s : {zero_one(), coherent_one()}) {
        for (double l : sweep_lambdas) {
            const ChainParams p = device(l);
            const CorrelationEvaluator eval(p, build_mode_table_for(p, s), s);
            s0 = std::max(s0, std::abs(eval(0.0) - cd(mean_photon_number(s), 0.0)));
        }
    }
    report(2, coeff < 1e-12 && lines < 1e-10 && s0 < 1e-10, "sum rules",
           fmt("coefficients %.3g (tol 1e-12)", coeff) + fmt(", line weights %.3g (tol 1e-10)", lines) +
               fmt(", S(0) - <n> %.3g (tol 1e-10)", s0));
}

void criterion_cross_path() {
    const auto start = clock_type::now();
    double worst = 0.0;
    for (double lam : {0.5, 1.0, 2.0}) {
        const ChainParams p{8, lam, 0.1, 0.05};
        for (const ProbeState& s : {zero_one(), coherent_one()}) {
            const auto table = build_mode_table_for(p, s);
            TimeGrid grid{40.0 / p.gamma_over_b, std::size_t{1} << 16, 0.0};
            grid.carrier = line_carrier(CorrelationEvaluator(p, table, s));
            const auto fft = spectrum_fft(correlation_series(p, table, s, grid));
            const auto analytic = spectrum_analytic(p, table, s, fft.frequencies, LineOptions{max_enumerable_modes, 0.0});
            const auto ed = oracle::oracle_spectrum(8, p, s, fft.frequencies);
            const double a = relative_l2(fft.values, analytic.values);
            const double b = relative_l2(fft.values, ed.values);
            const double c = relative_l2(analytic.values, ed.values);
            worst = std::max({worst, a, b, c});
        }
    }
    const double elapsed = seconds_since(start);
    report(3, worst < 0.01 && elapsed < 60.0, "cross-path spectra",
           fmt("max pairwise relative L2 = %.3g (tol 0.01)", worst) + fmt(", %.1f s (limit 60 s)", elapsed));
}

std::optional<double> first_drop(const CorrelationEvaluator& eval) {
    if (auto t = decay_time(eval, 0.1, 10.0, 1e-3)) return t;
    return decay_time(eval, 0.1, 8.0 / device_gamma, 0.05);
}

void criterion_decay() {
    const auto start = clock_type::now();
    const ProbeState s = zero_one();
    std::vector<double> times;
    std::string detail;
    for (double lam : sweep_lambdas) {
        const ChainParams p = device(lam);
        const CorrelationEvaluator eval(p, build_mode_table_for(p, s), s);
        const auto t = first_drop(eval);
        times.push_back(t ? *t : std::numeric_limits<double>::infinity());
        detail += fmt("%g:", lam) + fmt("%.4g ", times.back());
    }
    const std::size_t at_one = 2;
    bool pass = std::isfinite(times[at_one]);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i != at_one && !(times[at_one] < times[i])) pass = false;
    }
    const double elapsed = seconds_since(start);
    pass = pass && elapsed < 300.0;
    report(4, pass, "decay fastest at lambda=1", "t(|S|/S0 < 0.1) " + detail + fmt("(%.1f s)", elapsed));
}

void criterion_broadening() {
    const ProbeState s = zero_one();
    std::vector<ChainParams> params;
    for (double lam : sweep_lambdas) params.push_back(device(lam));
    const auto grids = common_grids(params, std::vector<ProbeState>(params.size(), s));
    std::vector<BroadeningMetrics> m(params.size());
    parallel_for(params.size(), 0, [&](std::size_t i) {
        m[i] = broadening_metrics(compute_spectrum(params[i], s, grids[i], 1).spectrum);
    });
    auto argmax = [&](auto field) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < m.size(); ++i) {
            if (field(m[i]) > field(m[best])) best = i;
        }
        return sweep_lambdas[best];
    };
    const double w90_peak = argmax([](const BroadeningMetrics& x) { return x.w90; });
    const double entropy_peak = argmax([](const BroadeningMetrics& x) { return x.entropy; });
    const double ratio = m[2].w90 / m[5].w90;
    std::string detail = fmt("grid 2^%.0f;", std::log2(static_cast<double>(grids[0].n_samples)));
    for (std::size_t i = 0; i < m.size(); ++i) {
        detail += fmt(" %g:", sweep_lambdas[i]) + fmt("w90=%.4g", m[i].w90) + fmt(",H=%.4g", m[i].entropy);
    }
    detail += fmt("; argmax w90 at %g", w90_peak) + fmt(", argmax entropy at %g", entropy_peak) +
              fmt(", w90(1)/w90(100) = %.4g", ratio) + fmt(" (floor %.0f)", w90_ratio_floor);
    report(5, w90_peak == 1.0 && entropy_peak == 1.0 && ratio >= w90_ratio_floor, "broadening peaks at lambda=1", detail);
}

void criterion_universality() {
    std::vector<ChainParams> params;
    std::vector<ProbeState> states;
    for (double lam : {100.0, 500.0}) {
        for (const ProbeState& s : {zero_one(), coherent_one()}) {
            params.push_back(device(lam));
            states.push_back(s);
        }
    }
    const auto grids = common_grids(params, states);
    std::vector<PeakInfo> peaks(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        peaks[i] = dominant_peak(compute_spectrum(params[i], states[i], grids[i], 0).spectrum, 5.0 * device_gamma);
    }
    bool single = true;
    double worst_secondary = 0.0, worst_gap = 0.0;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        worst_secondary = std::max(worst_secondary, peaks[i].secondary_ratio);
        single = single && peaks[i].secondary_ratio < 0.1;
        for (std::size_t j = i + 1; j < peaks.size(); ++j) {
            worst_gap = std::max(worst_gap, std::abs(peaks[i].location - peaks[j].location));
        }
    }

    double worst_env = 0.0;
    const double t_end = 3.0 / device_gamma;
    for (std::size_t probe = 0; probe < 2; ++probe) {
        const auto& s = states[probe];
        const CorrelationEvaluator a(params[probe], build_mode_table_for(params[probe], s), s);
        const CorrelationEvaluator b(params[probe + 2], build_mode_table_for(params[probe + 2], s), s);
        double num = 0.0, den = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double t = t_end * i / 4000.0;
            const double ea = std::abs(a(t)), eb = std::abs(b(t));
            num = std::max(num, std::abs(ea - eb));
            den = std::max(den, eb);
        }
        worst_env = std::max(worst_env, num / den);
    }
    std::string detail = "peaks";
    for (const auto& p : peaks) detail += fmt(" %.7f", p.location);
    detail += fmt("; max pairwise gap %.4g", worst_gap) + fmt(" (Gamma %.4g)", device_gamma) +
              fmt("; max secondary ratio %.3g (< 0.1)", worst_secondary) +
              fmt("; envelope rel Linf %.3g (tol 0.01)", worst_env);
    report(6, single && worst_gap <= device_gamma && worst_env < 0.01, "universality far from criticality", detail);
}

void criterion_smoothing() {
    const ProbeState s = zero_one();
    const std::vector<int> sizes{250, 500, 1000};
    std::vector<ChainParams> params;
    for (int n : sizes) params.push_back(device(1.0, n));
    const auto grids = common_grids(params, std::vector<ProbeState>(params.size(), s));
    std::vector<double> h;
    std::string detail;
    for (std::size_t i = 0; i < params.size(); ++i) {
        h.push_back(broadening_metrics(compute_spectrum(params[i], s, grids[i], 0).spectrum).entropy);
        detail += fmt(" N=%.0f:", sizes[i]) + fmt("%.4f", h.back());
    }
    report(7, h[0] <= h[1] && h[1] <= h[2], "entropy non-decreasing in N at lambda=1", "entropy" + detail);
}

void criterion_far_field() {
    const auto table = build_mode_table(device(100.0), 1);
    const DecoherenceKernel d(table, 1, 0);
    double lowest = 1.0;
    for (int i = 0; i <= 10000; ++i) lowest = std::min(lowest, std::abs(d(0.01 * i)));
    report(8, lowest > 0.99, "coherent far from criticality", fmt("min |D_10(t)| on [0, 100] = %.6f (> 0.99)", lowest));
}

void criterion_performance() {
    const ProbeState s = zero_one();
    constexpr std::size_t samples = std::size_t{1} << 14;
    const auto start = clock_type::now();
    std::vector<double> entropy(sweep_lambdas.size());
    std::vector<TimeGrid> grids;
    for (double lam : sweep_lambdas) {
        const ChainParams p = device(lam);
        TimeGrid g{8.0 / device_gamma, samples, 0.0};
        g.carrier = line_carrier(CorrelationEvaluator(p, build_mode_table_for(p, s), s));
        grids.push_back(g);
    }
    parallel_for(sweep_lambdas.size(), 0, [&](std::size_t i) {
        entropy[i] = broadening_metrics(compute_spectrum(device(sweep_lambdas[i]), s, grids[i], 1).spectrum).entropy;
    });
    const double sweep_time = seconds_since(start);

    auto timed_series = [&](int n_sites) {
        const ChainParams p = device(1.0, n_sites);
        const auto table = build_mode_table_for(p, s);
        const TimeGrid g{8.0 / device_gamma, samples, 0.0};
        const auto t0 = clock_type::now();
        const auto series = correlation_series(p, table, s, g, 1);
        return series.values.empty() ? 0.0 : seconds_since(t0);
    };
    double t500 = std::numeric_limits<double>::infinity();
    double t1000 = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 7; ++rep) {
        t500 = std::min(t500, timed_series(500));
        t1000 = std::min(t1000, timed_series(1000));
    }
    const double ratio = t1000 / t500;
    report(9, sweep_time < 300.0 && ratio >= 1.6 && ratio <= 2.4, "performance",
           fmt("6-lambda sweep at N=1000, 2^14 samples: %.1f s (limit 300 s)", sweep_time) +
               fmt(" on %.0f hardware threads", static_cast<double>(resolve_threads(0))) +
               fmt("; series time N=1000 / N=500 = %.3f (want [1.6, 2.4])", ratio));
}

} // namespace

int main() {
    criterion_oracle_equivalence();
    criterion_sum_rules();
    criterion_cross_path();
    criterion_decay();
    criterion_broadening();
    criterion_universality();
    criterion_smoothing();
    criterion_far_field();
    criterion_performance();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
