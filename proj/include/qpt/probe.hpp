// probe.hpp: initial resonator state in the Fock basis

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qpt/errors.hpp"

namespace qpt {

struct ProbeState {
    std::vector<std::complex<double>> amplitudes; // c_n, n = 0 .. n_max
    double truncation_error{0.0};                 // discarded tail probability

    [[nodiscard]] int n_max() const { return static_cast<int>(amplitudes.size()) - 1; }

    /// n |c_n|^2, the weight of the decoherence branch D_{n,n-1}.
    [[nodiscard]] double branch_weight(int n) const {
        if (n < 0 || n > n_max()) return 0.0;
        return n * std::norm(amplitudes[static_cast<std::size_t>(n)]);
    }

    [[nodiscard]] std::vector<double> branch_weights() const {
        std::vector<double> w(amplitudes.size());
        for (std::size_t n = 0; n < w.size(); ++n) w[n] = branch_weight(static_cast<int>(n));
        return w;
    }
};

inline ProbeState fock_superposition(std::span<const std::complex<double>> coeffs) {
    double norm2 = 0.0;
    for (const auto& c : coeffs) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ConfigError("probe coefficient is not finite");
        norm2 += std::norm(c);
    }
    if (norm2 == 0.0) throw DegenerateInputError("probe coefficients are all zero");
    ProbeState s;
    const double scale = 1.0 / std::sqrt(norm2);
    s.amplitudes.reserve(coeffs.size());
    for (const auto& c : coeffs) s.amplitudes.push_back(c * scale);
    return s;
}

/// Coherent state |alpha> truncated at the smallest n_max whose
/// photon-number-weighted tail sum_{n > n_max} n |c_n|^2 is below tail_tol.
/// Amplitudes follow c_{n+1} = c_n alpha / sqrt(n+1).
inline ProbeState coherent_state(std::complex<double> alpha, double tail_tol) {
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ConfigError("coherent tail_tol must lie in (0, 1)");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) throw ConfigError("coherent alpha is not finite");
    const double mean = std::norm(alpha);

    // Generate well past the point where n |c_n|^2 is negligible against tail_tol.
    std::vector<std::complex<double>> c{std::exp(-0.5 * mean)};
    for (std::size_t n = 0;; ++n) {
        const double p = std::norm(c.back());
        const double nn = static_cast<double>(n);
        if (nn > mean && (nn * p < 1e-6 * tail_tol * std::numeric_limits<double>::epsilon() || p == 0.0)) break;
        if (n > 1'000'000) throw ConfigError("coherent state amplitude too large to truncate");
        c.push_back(c.back() * alpha / std::sqrt(nn + 1.0));
    }

    // Tail sums from the top down.
    const std::size_t len = c.size();
    std::vector<double> weighted_tail(len + 1, 0.0), prob_tail(len + 1, 0.0);
    for (std::size_t n = len; n-- > 0;) {
        weighted_tail[n] = weighted_tail[n + 1] + static_cast<double>(n) * std::norm(c[n]);
        prob_tail[n] = prob_tail[n + 1] + std::norm(c[n]);
    }
    std::size_t n_max = 0;
    while (weighted_tail[n_max + 1] >= tail_tol) ++n_max;

    ProbeState s;
    s.amplitudes.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n_max + 1));
    s.truncation_error = prob_tail[n_max + 1];
    return s;
}

inline double mean_photon_number(const ProbeState& s) {
    double m = 0.0;
    for (int n = 1; n <= s.n_max(); ++n) m += s.branch_weight(n);
    return m;
}

} // namespace qpt
