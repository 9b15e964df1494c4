// decoherence.hpp: decoherence factor D_{n,n-1}(t) and its Lorentzian lines
//
// Every pseudo-spin mode contributes a factor
//   d_k(t) = sum_{a,b = +-} c_ab exp(i (a eps_nk + b eps_{n-1,k}) t),
// with real weights c_ab that sum to one. D is the product of d_k over the
// positive momenta, so D is the characteristic function of a sum of
// independent (signed) four-point frequency distributions.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qpt/errors.hpp"
#include "qpt/tfim.hpp"

namespace qpt {

using complex = std::complex<double>;

struct ModeCoefficients {
    double k{};
    double pp{};
    double pm{};
    double mp{};
    double mm{};

    [[nodiscard]] double sum() const { return pp + pm + mp + mm; }
    [[nodiscard]] std::array<double, 4> as_array() const { return {pp, pm, mp, mm}; }
};

/// Weights of the four phase factors for one mode. alpha_n belongs to the
/// branch evolved forward-conjugated (exp(i H_n t)), alpha_prev to exp(-i H_{n-1} t).
inline ModeCoefficients mode_coefficients(double alpha_n, double alpha_prev, double k = 0.0) {
    const double sn = std::sin(alpha_n), cn = std::cos(alpha_n);
    const double sp = std::sin(alpha_prev), cp = std::cos(alpha_prev);
    const double delta = alpha_prev - alpha_n;
    const double sd = std::sin(delta), cd = std::cos(delta);
    return {k, -sn * cp * sd, sn * sp * cd, cn * cp * cd, cn * sp * sd};
}

/// Line frequencies in the same order as ModeCoefficients::as_array().
inline std::array<double, 4> mode_frequencies(double eps_n, double eps_prev) {
    return {eps_n + eps_prev, eps_n - eps_prev, -eps_n + eps_prev, -eps_n - eps_prev};
}

inline complex mode_factor(const ModeCoefficients& c, double eps_n, double eps_prev, double t) {
    const complex u = std::polar(1.0, eps_n * t);
    const complex v = std::polar(1.0, eps_prev * t);
    return c.pp * (u * v) + c.pm * (u * std::conj(v)) + c.mp * (std::conj(u) * v) + c.mm * std::conj(u * v);
}

inline constexpr double underflow_floor = 1e-300;

/// Precomputed per-mode data for <G| exp(i H_left t) exp(-i H_right t) |G>.
///
/// Evaluation multiplies the mode factors in ascending-k order, so results are
/// bitwise reproducible regardless of how calls are distributed over threads.
class DecoherenceKernel {
public:
    DecoherenceKernel(const ModeTable& table, int left, int right) {
        if (!table.has_branch(left) || !table.has_branch(right)) {
            throw ConfigError("decoherence kernel needs branches " + std::to_string(left) + " and " +
                              std::to_string(right) + " in the mode table");
        }
        const std::size_t modes = table.mode_count();
        eps_left_.resize(modes);
        eps_right_.resize(modes);
        coeffs_.resize(modes);
        for (std::size_t m = 0; m < modes; ++m) {
            eps_left_[m] = table.epsilon(left, m);
            eps_right_[m] = table.epsilon(right, m);
            coeffs_[m] = mode_coefficients(table.alpha(left, m), table.alpha(right, m), table.momenta()[m]);

            const auto w = coeffs_[m].as_array();
            const auto f = mode_frequencies(eps_left_[m], eps_right_[m]);
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t j = 0; j < 4; ++j) {
                m1 += w[j] * f[j];
                m2 += w[j] * f[j] * f[j];
            }
            double reach = 0.0;
            for (std::size_t j = 0; j < 4; ++j) {
                if (std::abs(w[j]) > 1e-14) reach = std::max(reach, std::abs(f[j] - m1));
            }
            mean_ += m1;
            variance_ += std::max(0.0, m2 - m1 * m1);
            reach_ += reach;
        }
    }

    [[nodiscard]] complex operator()(double t) const {
        complex prod{1.0, 0.0};
        for (std::size_t m = 0; m < coeffs_.size(); ++m) {
            prod *= mode_factor(coeffs_[m], eps_left_[m], eps_right_[m], t);
            if (std::abs(prod.real()) < underflow_floor && std::abs(prod.imag()) < underflow_floor) {
                return {0.0, 0.0};
            }
        }
        return prod;
    }

    [[nodiscard]] const std::vector<ModeCoefficients>& coefficients() const { return coeffs_; }
    [[nodiscard]] double epsilon_left(std::size_t m) const { return eps_left_[m]; }
    [[nodiscard]] double epsilon_right(std::size_t m) const { return eps_right_[m]; }

    // First two cumulants of the line-frequency distribution and the largest
    // possible excursion of any line with non-negligible weight from the mean.
    [[nodiscard]] double mean_frequency() const { return mean_; }
    [[nodiscard]] double frequency_variance() const { return variance_; }
    [[nodiscard]] double frequency_reach() const { return reach_; }

private:
    std::vector<double> eps_left_;
    std::vector<double> eps_right_;
    std::vector<ModeCoefficients> coeffs_;
    double mean_{0.0};
    double variance_{0.0};
    double reach_{0.0};
};

inline complex decoherence_factor(const ModeTable& table, int n, double t) {
    if (n < 1) throw ConfigError("decoherence factor needs branch n >= 1");
    return DecoherenceKernel(table, n, n - 1)(t);
}

struct SpectralLine {
    double center{}; // Omega, units of B
    double weight{}; // F, may be negative
};

struct LineSet {
    std::vector<SpectralLine> lines;
    double pruned_weight{0.0};         // signed weight of all dropped configurations
    double pruned_configurations{0.0}; // count, as a double since it can exceed 2^64
};

inline constexpr int max_enumerable_modes = 14;

/// Every configuration {(a_k, b_k)} of D_{n,n-1} with its weight prod_k c_{a_k b_k,k}
/// and center sum_k (a_k eps_nk + b_k eps_{n-1,k}). A partial product whose
/// magnitude falls below weight_floor is dropped together with all its
/// completions; because each remaining mode's weights sum to one, the dropped
/// signed mass equals the partial product exactly.
inline LineSet enumerate_lines(const ModeTable& table, int n, int max_modes = max_enumerable_modes,
                               double weight_floor = 1e-15) {
    if (max_modes > max_enumerable_modes) {
        throw ConfigError("max_modes is capped at " + std::to_string(max_enumerable_modes));
    }
    if (static_cast<int>(table.mode_count()) > max_modes) {
        throw CapacityError("line enumeration needs 4^" + std::to_string(table.mode_count()) +
                            " configurations (N/2 > " + std::to_string(max_modes) +
                            "); use the FFT spectrum path for this chain size");
    }
    if (n < 1) throw ConfigError("line enumeration needs branch n >= 1");
    const DecoherenceKernel kernel(table, n, n - 1);
    const auto& coeffs = kernel.coefficients();
    const std::size_t modes = coeffs.size();

    LineSet out;
    struct Frame {
        std::size_t mode;
        double weight;
        double center;
    };
    std::vector<Frame> stack{{0, 1.0, 0.0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (std::abs(f.weight) < weight_floor) {
            out.pruned_weight += f.weight;
            out.pruned_configurations += std::pow(4.0, static_cast<double>(modes - f.mode));
            continue;
        }
        if (f.mode == modes) {
            out.lines.push_back({f.center, f.weight});
            continue;
        }
        const auto w = coeffs[f.mode].as_array();
        const auto fr = mode_frequencies(kernel.epsilon_left(f.mode), kernel.epsilon_right(f.mode));
        // pushed in reverse so lines come out in (pp, pm, mp, mm) lexical order
        for (std::size_t j = 4; j-- > 0;) {
            stack.push_back({f.mode + 1, f.weight * w[j], f.center + fr[j]});
        }
    }
    return out;
}

} // namespace qpt
