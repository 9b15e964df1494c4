// tfim.hpp: free-fermion solution of the transverse-field Ising ring
//
// Momenta use antiperiodic fermion boundary conditions (even fermion-parity
// sector), k_m = (2m+1) pi / N for m = 0 .. N/2-1. Each positive k stands for
// the (k, -k) pair and carries one pseudo-spin.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qpt/errors.hpp"
#include "qpt/model.hpp"

namespace qpt {

inline std::vector<double> momentum_grid(int n_sites) {
    if (n_sites < 2 || n_sites % 2 != 0) {
        throw ConfigError("momentum grid needs an even n_sites >= 2, got " + std::to_string(n_sites));
    }
    std::vector<double> k(static_cast<std::size_t>(n_sites / 2));
    for (std::size_t m = 0; m < k.size(); ++m) {
        k[m] = (2.0 * static_cast<double>(m) + 1.0) * std::numbers::pi / n_sites;
    }
    return k;
}

/// Quasiparticle energy 2 sqrt(1 + lam^2 - 2 lam cos k) in units of B.
inline double dispersion(double k, double lam) {
    // (lam - cos k)^2 + sin^2 k keeps the radicand non-negative in floating point
    return 2.0 * std::hypot(lam - std::cos(k), std::sin(k));
}

/// Bogoliubov angle with tan(theta) = sin k / (lam - cos k), in [0, pi] for k in (0, pi).
inline double bogoliubov_angle(double k, double lam) {
    return std::atan2(std::sin(k), lam - std::cos(k));
}

/// Per-branch quasiparticle data on the positive-momentum grid.
///
/// Branch n describes the chain with transverse field lambda_n. alpha(n, m) is
/// half the angle between branch n's Bogoliubov frame and the frame of the
/// uncoupled chain (lambda itself), which defines the ground state |G>.
class ModeTable {
public:
    ModeTable() = default;

    ModeTable(const ChainParams& params, int n_max) : params_(params), n_max_(n_max) {
        params.validate();
        if (n_max < 1) throw ConfigError("mode table needs n_max >= 1");
        momenta_ = momentum_grid(params.n_sites);
        const std::size_t modes = momenta_.size();
        const std::size_t branches = static_cast<std::size_t>(n_max) + 1;
        theta_ref_.resize(modes);
        for (std::size_t m = 0; m < modes; ++m) theta_ref_[m] = bogoliubov_angle(momenta_[m], params.lambda);

        epsilon_.resize(branches * modes);
        theta_.resize(branches * modes);
        alpha_.resize(branches * modes);
        for (std::size_t n = 0; n < branches; ++n) {
            const double lam_n = branch_lambda(params, static_cast<int>(n));
            for (std::size_t m = 0; m < modes; ++m) {
                const std::size_t i = n * modes + m;
                epsilon_[i] = dispersion(momenta_[m], lam_n);
                theta_[i] = bogoliubov_angle(momenta_[m], lam_n);
                alpha_[i] = 0.5 * (theta_[i] - theta_ref_[m]);
            }
        }
    }

    [[nodiscard]] const ChainParams& params() const { return params_; }
    [[nodiscard]] int n_max() const { return n_max_; }
    [[nodiscard]] std::size_t mode_count() const { return momenta_.size(); }
    [[nodiscard]] const std::vector<double>& momenta() const { return momenta_; }
    [[nodiscard]] bool has_branch(int n) const { return n >= 0 && n <= n_max_; }

    [[nodiscard]] double lambda_n(int n) const { return branch_lambda(params_, n); }
    [[nodiscard]] double epsilon(int n, std::size_t m) const { return epsilon_[index(n, m)]; }
    [[nodiscard]] double theta(int n, std::size_t m) const { return theta_[index(n, m)]; }
    [[nodiscard]] double alpha(int n, std::size_t m) const { return alpha_[index(n, m)]; }
    [[nodiscard]] double theta_reference(std::size_t m) const { return theta_ref_[m]; }

private:
    [[nodiscard]] std::size_t index(int n, std::size_t m) const {
        if (!has_branch(n)) throw ConfigError("branch " + std::to_string(n) + " is not in the mode table");
        return static_cast<std::size_t>(n) * momenta_.size() + m;
    }

    ChainParams params_{};
    int n_max_{0};
    std::vector<double> momenta_;
    std::vector<double> theta_ref_;
    std::vector<double> epsilon_; // [branch][mode], row-major
    std::vector<double> theta_;
    std::vector<double> alpha_;
};

inline ModeTable build_mode_table(const ChainParams& params, int n_max) { return ModeTable(params, n_max); }

/// Even-sector ground energy -sum_{k>0} eps_k(lam) of the ring (units of B).
inline double free_fermion_ground_energy(int n_sites, double lam) {
    double e = 0.0;
    for (double k : momentum_grid(n_sites)) e -= dispersion(k, lam);
    return e;
}

} // namespace qpt
