// spectrum.hpp: correlation function S(t), spectrum S(omega) and broadening metrics
//
// S(t) = sum_n n|c_n|^2 D_{n,n-1}(t) exp(-Gamma |t|),  S(omega) = int dt exp(-i omega t) S(t).
// Each line (Omega, F) of D becomes the Lorentzian 2 Gamma F / (Gamma^2 + (omega - Omega)^2).

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpt/decoherence.hpp"
#include "qpt/errors.hpp"
#include "qpt/fft.hpp"
#include "qpt/model.hpp"
#include "qpt/parallel.hpp"
#include "qpt/probe.hpp"
#include "qpt/tfim.hpp"

namespace qpt {

/// Mode table holding every branch the probe state can populate.
inline ModeTable build_mode_table_for(const ChainParams& params, const ProbeState& state) {
    return build_mode_table(params, std::max(1, state.n_max()));
}

/// Uniform two-sided grid t_j = -t_max + j dt, j = 0 .. n_samples-1, dt = 2 t_max / n_samples.
/// The spectrum is computed in a frame rotating at `carrier`; reported
/// frequencies are absolute.
struct TimeGrid {
    double t_max{1.0};
    std::size_t n_samples{2};
    double carrier{0.0};

    [[nodiscard]] double dt() const { return 2.0 * t_max / static_cast<double>(n_samples); }
    [[nodiscard]] double time(std::size_t j) const { return -t_max + static_cast<double>(j) * dt(); }
    [[nodiscard]] double frequency_step() const { return std::numbers::pi / t_max; }
    [[nodiscard]] double nyquist() const { return std::numbers::pi / dt(); }

    void validate() const {
        if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("time_grid.t_max must be positive");
        if (n_samples < 2 || !std::has_single_bit(n_samples)) {
            throw ConfigError("time_grid.n_samples must be a power of two >= 2");
        }
        if (!std::isfinite(carrier)) throw ConfigError("time_grid carrier must be finite");
    }
};

/// Evaluates S(t) at arbitrary real t from the exact exponential-sum form.
class CorrelationEvaluator {
public:
    CorrelationEvaluator(const ChainParams& params, const ModeTable& table, const ProbeState& state,
                         double weight_floor = 0.0)
        : gamma_(params.gamma_over_b) {
        for (int n = 1; n <= state.n_max(); ++n) {
            const double w = state.branch_weight(n);
            if (!(w > weight_floor)) continue;
            if (!table.has_branch(n)) {
                throw ConfigError("probe populates branch n=" + std::to_string(n) +
                                  " but the mode table stops at n_max=" + std::to_string(table.n_max()));
            }
            branches_.push_back({n, w, DecoherenceKernel(table, n, n - 1)});
            s0_ += w;
        }
    }

    [[nodiscard]] complex operator()(double t) const {
        complex s{0.0, 0.0};
        for (const auto& b : branches_) s += b.weight * b.kernel(t);
        return s * std::exp(-gamma_ * std::abs(t));
    }

    /// S(0), equal to the mean photon number of the probe.
    [[nodiscard]] double s0() const { return s0_; }
    [[nodiscard]] bool empty() const { return branches_.empty(); }

    struct Branch {
        int n;
        double weight;
        DecoherenceKernel kernel;
    };
    [[nodiscard]] const std::vector<Branch>& branches() const { return branches_; }

private:
    double gamma_;
    double s0_{0.0};
    std::vector<Branch> branches_;
};

struct AutoGridOptions {
    double t_max_in_decay_times = 8.0; // t_max = this / Gamma
    double sigma_multiple = 8.0;
    double gamma_margin = 20.0;
    double pad = 2.0;
    std::size_t min_samples = 256;
    std::size_t max_samples = std::size_t{1} << 22;
};

struct GridEstimate {
    TimeGrid grid;
    double half_band{0.0}; // line spread around the carrier the grid must hold
    bool capped{false};    // n_samples hit max_samples; high-frequency lines may alias
};

/// Weighted mean line frequency over the populated branches (exact first
/// cumulant). Spectra are demodulated by this carrier.
inline double line_carrier(const CorrelationEvaluator& eval) {
    if (!(eval.s0() > 0.0)) return 0.0;
    double carrier = 0.0;
    for (const auto& b : eval.branches()) carrier += b.weight * b.kernel.mean_frequency();
    return carrier / eval.s0();
}

/// Resolves the "auto" grid. The carrier is the weighted mean line frequency
/// (exact first cumulant); the half band covers, per branch, the distance of
/// its mean from the carrier plus min(hard reach, sigma_multiple * sigma).
inline GridEstimate auto_time_grid(const ChainParams& params, const ModeTable& table, const ProbeState& state,
                                   const AutoGridOptions& opt = {}) {
    if (!(params.gamma_over_b > 0.0)) throw ConfigError("an automatic time grid needs gamma_over_b > 0");
    const CorrelationEvaluator eval(params, table, state);
    const double gamma = params.gamma_over_b;

    const double carrier = line_carrier(eval);
    double spread = 0.0;
    for (const auto& b : eval.branches()) {
        const double sigma = std::sqrt(b.kernel.frequency_variance());
        spread = std::max(spread, std::abs(b.kernel.mean_frequency() - carrier) +
                                      std::min(b.kernel.frequency_reach(), opt.sigma_multiple * sigma));
    }
    GridEstimate est;
    est.half_band = spread + opt.gamma_margin * gamma;
    est.grid.t_max = opt.t_max_in_decay_times / gamma;
    est.grid.carrier = carrier;
    const double nyquist = opt.pad * est.half_band;
    const double needed = std::ceil(2.0 * est.grid.t_max * nyquist / std::numbers::pi);
    std::size_t n = opt.min_samples;
    while (static_cast<double>(n) < needed && n < opt.max_samples) n <<= 1;
    est.capped = static_cast<double>(n) < needed;
    est.grid.n_samples = n;
    return est;
}

struct CorrelationSeries {
    TimeGrid grid;
    std::vector<complex> values; // S(t_j), not demodulated

    [[nodiscard]] double t_max() const { return grid.t_max; }
    [[nodiscard]] std::size_t n_samples() const { return grid.n_samples; }
    [[nodiscard]] double time(std::size_t j) const { return grid.time(j); }
    /// Sample at t = 0 (index n_samples / 2).
    [[nodiscard]] complex at_zero() const { return values[grid.n_samples / 2]; }
};

inline CorrelationSeries correlation_series(const ChainParams& params, const ModeTable& table,
                                            const ProbeState& state, const TimeGrid& grid, unsigned threads = 1) {
    grid.validate();
    const CorrelationEvaluator eval(params, table, state);
    CorrelationSeries s;
    s.grid = grid;
    s.values.assign(grid.n_samples, complex{0.0, 0.0});
    if (eval.empty()) return s;
    parallel_for(grid.n_samples, threads, [&](std::size_t j) { s.values[j] = eval(grid.time(j)); });
    return s;
}

struct Spectrum {
    std::vector<double> frequencies; // uniform, units of B
    std::vector<double> values;      // S(omega)
    double imaginary_residue{0.0};   // max |Im| / max |Re| of the discrete transform

    [[nodiscard]] double step() const {
        return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0;
    }
};

/// Discrete two-sided transform S(omega_m) = dt sum_j S(t_j) exp(-i omega_m t_j)
/// on omega_m = carrier + m pi / t_max, m = -n/2 .. n/2-1. The sample at -t_max
/// stands in for both ends of the window; since S(-t) = conj S(t) it is
/// replaced by its real part, which keeps the transform Hermitian.
inline Spectrum spectrum_fft(const CorrelationSeries& series) {
    const TimeGrid& g = series.grid;
    g.validate();
    if (series.values.size() != g.n_samples) throw ConfigError("correlation series length does not match its grid");
    const std::size_t n = g.n_samples;
    std::vector<complex> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = series.values[j] * std::polar(1.0, -g.carrier * g.time(j));
    x[0] = complex{x[0].real(), 0.0};
    const auto X = detail::forward_dft(x);

    Spectrum out;
    out.frequencies.resize(n);
    out.values.resize(n);
    const double dt = g.dt();
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    double max_re = 0.0, max_im = 0.0;
    for (std::ptrdiff_t m = -half; m < half; ++m) {
        const std::size_t i = static_cast<std::size_t>(m + half);
        const std::size_t idx = static_cast<std::size_t>((m + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n));
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const complex v = dt * sign * X[idx];
        out.frequencies[i] = g.carrier + static_cast<double>(m) * g.frequency_step();
        out.values[i] = v.real();
        max_re = std::max(max_re, std::abs(v.real()));
        max_im = std::max(max_im, std::abs(v.imag()));
    }
    out.imaginary_residue = max_re > 0.0 ? max_im / max_re : 0.0;
    return out;
}

inline double lorentzian(double omega, double center, double gamma) {
    const double d = omega - center;
    return 2.0 * gamma / (gamma * gamma + d * d);
}

struct LineOptions {
    int max_modes = max_enumerable_modes;
    double weight_floor = 1e-15;
};

/// Exact sum of Lorentzians over every enumerated line of every populated branch.
inline Spectrum spectrum_analytic(const ChainParams& params, const ModeTable& table, const ProbeState& state,
                                  std::span<const double> freq_grid, const LineOptions& opt = {}) {
    if (!(params.gamma_over_b > 0.0)) throw ConfigError("the Lorentzian spectrum needs gamma_over_b > 0");
    const double gamma = params.gamma_over_b;
    Spectrum out;
    out.frequencies.assign(freq_grid.begin(), freq_grid.end());
    out.values.assign(freq_grid.size(), 0.0);
    for (int n = 1; n <= state.n_max(); ++n) {
        const double w = state.branch_weight(n);
        if (!(w > 0.0)) continue;
        if (!table.has_branch(n)) throw ConfigError("probe populates branch n=" + std::to_string(n) + " missing from the mode table");
        const LineSet set = enumerate_lines(table, n, opt.max_modes, opt.weight_floor);
        for (std::size_t i = 0; i < freq_grid.size(); ++i) {
            double acc = 0.0;
            for (const auto& line : set.lines) acc += line.weight * lorentzian(freq_grid[i], line.center, gamma);
            out.values[i] += w * acc;
        }
    }
    return out;
}

/// Uniform frequency grid matching spectrum_fft's output for `grid`.
inline std::vector<double> frequency_grid(const TimeGrid& grid) {
    std::vector<double> f(grid.n_samples);
    const auto half = static_cast<std::ptrdiff_t>(grid.n_samples / 2);
    for (std::ptrdiff_t m = -half; m < half; ++m) {
        f[static_cast<std::size_t>(m + half)] = grid.carrier + static_cast<double>(m) * grid.frequency_step();
    }
    return f;
}

struct BroadeningMetrics {
    double w90{0.0};           // smallest contiguous window holding 90% of |S|, units of B
    double entropy{0.0};       // -sum p ln p, nats
    double participation{0.0}; // (1 / sum p^2) / grid size, in (0, 1]
};

inline constexpr double spectrum_noise_floor = 1e-12;

/// Metrics on p_i = |S_i| / sum_j |S_j|. Magnitudes are used because line
/// weights can be negative.
inline BroadeningMetrics broadening_metrics(const Spectrum& spec) {
    const std::size_t n = spec.values.size();
    double total = 0.0, peak = 0.0;
    for (double v : spec.values) {
        total += std::abs(v);
        peak = std::max(peak, std::abs(v));
    }
    if (n == 0 || !(peak > spectrum_noise_floor)) throw DegenerateInputError("spectrum is zero to within the noise floor");

    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = std::abs(spec.values[i]) / total;

    BroadeningMetrics m;
    double sum_sq = 0.0;
    for (double pi : p) {
        if (pi > 0.0) m.entropy -= pi * std::log(pi);
        sum_sq += pi * pi;
    }
    m.participation = (1.0 / sum_sq) / static_cast<double>(n);

    // two-pointer scan over the prefix sums for the narrowest 90% window
    constexpr double target = 0.9 - 1e-12;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + p[i];
    std::size_t best = n;
    std::size_t hi = 0;
    for (std::size_t lo = 0; lo < n; ++lo) {
        hi = std::max(hi, lo);
        while (hi < n && prefix[hi] - prefix[lo] < target) ++hi;
        if (prefix[hi] - prefix[lo] < target) break;
        best = std::min(best, hi - lo);
    }
    m.w90 = static_cast<double>(best) * spec.step();
    return m;
}

struct PeakInfo {
    double location{0.0};       // refined center of the highest peak
    double height{0.0};         // |S| at the highest sample
    double secondary_ratio{0.0}; // highest other local maximum / height
};

/// Highest peak of |S(omega)|. The center is refined with a parabola through
/// 1/S at the three top samples, which is exact for an isolated Lorentzian.
/// Local maxima within `exclusion` of the main peak are not counted as secondary.
inline PeakInfo dominant_peak(const Spectrum& spec, double exclusion) {
    const std::size_t n = spec.values.size();
    if (n == 0) throw DegenerateInputError("empty spectrum");
    std::size_t top = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(spec.values[i]) > std::abs(spec.values[top])) top = i;
    }
    PeakInfo info;
    info.height = std::abs(spec.values[top]);
    info.location = spec.frequencies[top];
    if (top > 0 && top + 1 < n) {
        const double y0 = std::abs(spec.values[top - 1]);
        const double y1 = std::abs(spec.values[top]);
        const double y2 = std::abs(spec.values[top + 1]);
        if (y0 > 0.0 && y2 > 0.0) {
            const double a = 1.0 / y0, b = 1.0 / y1, c = 1.0 / y2;
            const double denom = a - 2.0 * b + c;
            if (denom > 0.0) {
                const double offset = 0.5 * (a - c) / denom;
                info.location += std::clamp(offset, -1.0, 1.0) * spec.step();
            }
        }
    }
    double secondary = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double v = std::abs(spec.values[i]);
        if (v > std::abs(spec.values[i - 1]) && v >= std::abs(spec.values[i + 1]) &&
            std::abs(spec.frequencies[i] - spec.frequencies[top]) > exclusion) {
            secondary = std::max(secondary, v);
        }
    }
    info.secondary_ratio = info.height > 0.0 ? secondary / info.height : 0.0;
    return info;
}

inline double relative_l2(std::span<const double> a, std::span<const double> ref) {
    if (a.size() != ref.size()) throw ConfigError("relative_l2: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ref[i]) * (a[i] - ref[i]);
        den += ref[i] * ref[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

struct FarFieldReport {
    double deviation{0.0}; // relative L2 distance to S0 * L(omega, shift, Gamma)
    double shift{0.0};     // fitted global frequency shift
    double s0{0.0};
    TimeGrid grid;
};

/// Compares the spectrum with a single Lorentzian of total weight S(0),
/// allowed one global shift (taken from the dominant peak). The reference is
/// pushed through the same discrete transform so discretisation cancels.
inline FarFieldReport far_field_check(const ChainParams& params, const ModeTable& table, const ProbeState& state,
                                      std::optional<TimeGrid> grid = std::nullopt, unsigned threads = 1) {
    FarFieldReport r;
    r.grid = grid ? *grid : auto_time_grid(params, table, state).grid;
    const CorrelationSeries series = correlation_series(params, table, state, r.grid, threads);
    r.s0 = mean_photon_number(state);
    if (r.s0 == 0.0) return r;
    const Spectrum actual = spectrum_fft(series);
    r.shift = dominant_peak(actual, 5.0 * params.gamma_over_b).location;

    CorrelationSeries ref;
    ref.grid = r.grid;
    ref.values.resize(r.grid.n_samples);
    for (std::size_t j = 0; j < r.grid.n_samples; ++j) {
        const double t = r.grid.time(j);
        ref.values[j] = r.s0 * std::polar(std::exp(-params.gamma_over_b * std::abs(t)), r.shift * t);
    }
    const Spectrum reference = spectrum_fft(ref);
    r.deviation = relative_l2(actual.values, reference.values);
    return r;
}

/// First t > 0 at which |S(t)| / S(0) drops below `threshold`, located by a
/// forward scan with spacing `step` and bisection. nullopt if it never does
/// before t_limit.
inline std::optional<double> decay_time(const CorrelationEvaluator& eval, double threshold, double t_limit,
                                        double step) {
    if (eval.s0() == 0.0) return std::nullopt;
    auto ratio = [&](double t) { return std::abs(eval(t)) / eval.s0(); };
    double prev = 0.0;
    for (std::size_t i = 1;; ++i) {
        const double t = static_cast<double>(i) * step;
        if (t > t_limit) break;
        if (ratio(t) < threshold) {
            double lo = prev, hi = t;
            for (int it = 0; it < 80 && hi - lo > 1e-13 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (ratio(mid) < threshold ? hi : lo) = mid;
            }
            return hi;
        }
        prev = t;
    }
    return std::nullopt;
}

} // namespace qpt
