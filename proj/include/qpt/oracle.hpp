// oracle.hpp: brute-force validators
//
// Dense 2^N exact diagonalization of the spin Hamiltonian, 2x2 pseudo-spin
// propagators, and the eigenvector-overlap form of the spectrum. Nothing here
// uses the free-fermion solution; the only shared inputs are the model
// parameters.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpt/errors.hpp"
#include "qpt/model.hpp"
#include "qpt/probe.hpp"
#include "qpt/spectrum.hpp"

namespace qpt::oracle {

inline constexpr int max_dense_sites = 12;
inline constexpr int max_spectrum_sites = 10;

/// B sum_a (lam sigma_x^(a) + sigma_z^(a) sigma_z^(a+1)) on a ring, B = 1, in
/// the charge basis. Bit a of a basis index set means site a holds |1>, so
/// sigma_z = +1 on |0> and sigma_x = -(|0><1| + |1><0|).
struct DenseSpinHamiltonian {
    int n_sites{};
    double lambda{};
    Eigen::MatrixXd matrix;
};

inline void check_sites(int n_sites, int cap) {
    if (n_sites < 2 || n_sites % 2 != 0) throw ConfigError("oracle needs an even n_sites >= 2");
    if (n_sites > cap) {
        throw CapacityError("dense oracle is limited to n_sites <= " + std::to_string(cap) + ", got " +
                            std::to_string(n_sites));
    }
}

inline DenseSpinHamiltonian build_dense(int n_sites, double lam) {
    check_sites(n_sites, max_dense_sites);
    const std::size_t dim = std::size_t{1} << n_sites;
    DenseSpinHamiltonian h{n_sites, lam, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
    for (std::size_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int a = 0; a < n_sites; ++a) {
            const int b = (a + 1) % n_sites;
            const double za = ((s >> a) & 1U) ? -1.0 : 1.0;
            const double zb = ((s >> b) & 1U) ? -1.0 : 1.0;
            diag += za * zb;
            const std::size_t flipped = s ^ (std::size_t{1} << a);
            h.matrix(static_cast<Eigen::Index>(flipped), static_cast<Eigen::Index>(s)) += -lam;
        }
        h.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) += diag;
    }
    return h;
}

/// prod_a sigma_x^(a) applied to v. For even N it maps |s> to |~s>.
inline Eigen::VectorXd apply_parity(int n_sites, const Eigen::VectorXd& v) {
    const std::size_t dim = std::size_t{1} << n_sites;
    const std::size_t mask = dim - 1;
    const double sign = (n_sites % 2 == 0) ? 1.0 : -1.0;
    Eigen::VectorXd out(v.size());
    for (std::size_t s = 0; s < dim; ++s) out(static_cast<Eigen::Index>(s ^ mask)) = sign * v(static_cast<Eigen::Index>(s));
    return out;
}

struct GroundState {
    double energy{};
    Eigen::VectorXd vector;
};

/// H restricted to the parity +1 sector, in the basis (|s> + |~s>)/sqrt(2)
/// for s < 2^(N-1).
inline Eigen::MatrixXd even_sector(const DenseSpinHamiltonian& h) {
    const std::size_t dim = std::size_t{1} << h.n_sites;
    const std::size_t half = dim / 2;
    const std::size_t mask = dim - 1;
    const auto I = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
    Eigen::MatrixXd even(I(half), I(half));
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t ci = i ^ mask;
        for (std::size_t j = 0; j < half; ++j) {
            const std::size_t cj = j ^ mask;
            even(I(i), I(j)) = 0.5 * (h.matrix(I(i), I(j)) + h.matrix(I(i), I(cj)) + h.matrix(I(ci), I(j)) +
                                      h.matrix(I(ci), I(cj)));
        }
    }
    return even;
}

/// Maps even-sector coordinates (columns of y) back to the full basis.
inline Eigen::MatrixXd lift_even(int n_sites, const Eigen::MatrixXd& y) {
    const std::size_t dim = std::size_t{1} << n_sites;
    const std::size_t mask = dim - 1;
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd full(static_cast<Eigen::Index>(dim), y.cols());
    for (std::size_t i = 0; i < dim / 2; ++i) {
        full.row(static_cast<Eigen::Index>(i)) = r * y.row(static_cast<Eigen::Index>(i));
        full.row(static_cast<Eigen::Index>(i ^ mask)) = r * y.row(static_cast<Eigen::Index>(i));
    }
    return full;
}

/// Lowest eigenvector with parity +1. Diagonalizing inside the even sector
/// fixes the choice within the nearly degenerate doublet of the ordered phase.
inline GroundState even_parity_ground_state(const DenseSpinHamiltonian& h) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(even_sector(h));
    GroundState g;
    g.energy = solver.eigenvalues()(0);
    g.vector = lift_even(h.n_sites, solver.eigenvectors().leftCols(1)).col(0);
    return g;
}

inline double ground_energy(int n_sites, double lam) { return even_parity_ground_state(build_dense(n_sites, lam)).energy; }

/// Eigen-decomposition of one branch Hamiltonian and the overlaps <E_i|G>.
/// |G> has parity +1 and every branch conserves parity, so only the even
/// sector is diagonalized; odd eigenvectors have zero overlap with |G>.
struct BranchEigensystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors; // 2^N x 2^(N-1), even eigenvectors in the full basis
    Eigen::VectorXd overlaps;
};

inline BranchEigensystem diagonalize_branch(int n_sites, double lam, const Eigen::VectorXd& ground) {
    const auto h = build_dense(n_sites, lam);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(even_sector(h));
    BranchEigensystem b{solver.eigenvalues(), lift_even(n_sites, solver.eigenvectors()), {}};
    b.overlaps = b.vectors.transpose() * ground;
    return b;
}

/// <G| exp(i H_n t) exp(-i H_{n-1} t) |G> at each requested time, with |G> the
/// even-parity ground state of the uncoupled chain h(lambda).
inline std::vector<std::complex<double>> oracle_decoherence(int n_sites, const ChainParams& params, int n_branch,
                                                            std::span<const double> times) {
    check_sites(n_sites, max_dense_sites);
    if (n_branch < 1) throw ConfigError("oracle decoherence needs branch n >= 1");
    const GroundState g = even_parity_ground_state(build_dense(n_sites, params.lambda));
    const auto hn = diagonalize_branch(n_sites, branch_lambda(params, n_branch), g.vector);
    const auto hp = diagonalize_branch(n_sites, branch_lambda(params, n_branch - 1), g.vector);

    // <G|e^{iH_n t}e^{-iH_{n-1} t}|G> = sum_ij a_i e^{i E_i t} <E_i|E'_j> e^{-i E'_j t} b_j
    const Eigen::MatrixXd overlap = hn.vectors.transpose() * hp.vectors;
    std::vector<std::complex<double>> out;
    out.reserve(times.size());
    const Eigen::Index dim = hp.energies.size();
    for (double t : times) {
        Eigen::VectorXd re(dim), im(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            const std::complex<double> c = std::polar(1.0, -hp.energies(j) * t) * hp.overlaps(j);
            re(j) = c.real();
            im(j) = c.imag();
        }
        const Eigen::VectorXd ore = overlap * re, oim = overlap * im;
        std::complex<double> acc{0.0, 0.0};
        for (Eigen::Index i = 0; i < dim; ++i) {
            acc += std::polar(1.0, hn.energies(i) * t) * hn.overlaps(i) * std::complex<double>(ore(i), oim(i));
        }
        out.push_back(acc);
    }
    return out;
}

inline std::complex<double> oracle_decoherence(int n_sites, const ChainParams& params, int n_branch, double t) {
    const double times[] = {t};
    return oracle_decoherence(n_sites, params, n_branch, times).front();
}

/// One pseudo-spin pair in the basis {|G_k>, gamma^dag_{-k} gamma^dag_k |G_k>}:
/// s_z = diag(-1, 1) and s_x = i(gamma_{-k} gamma_k + h.c.) = [[0, -i], [i, 0]].
inline std::complex<double> oracle_mode_factor(double eps_n, double eps_prev, double alpha_n, double alpha_prev,
                                               double t) {
    using M2 = Eigen::Matrix2cd;
    const std::complex<double> I(0.0, 1.0);
    M2 sz;
    sz << -1.0, 0.0, 0.0, 1.0;
    M2 sx;
    sx << 0.0, -I, I, 0.0;
    auto propagator = [&](double eps, double alpha, double time) {
        const M2 h = eps * (std::cos(2.0 * alpha) * sz + std::sin(2.0 * alpha) * sx);
        const Eigen::SelfAdjointEigenSolver<M2> solver(h);
        M2 phases = M2::Zero();
        for (int i = 0; i < 2; ++i) phases(i, i) = std::polar(1.0, -solver.eigenvalues()(i) * time);
        return M2(solver.eigenvectors() * phases * solver.eigenvectors().adjoint());
    };
    const M2 u = propagator(eps_n, alpha_n, -t) * propagator(eps_prev, alpha_prev, t);
    return u(0, 0);
}

/// Eigenvector-overlap form: lines of weight w_n <G|E_i^n><E_i^n|E_j^{n-1}><E_j^{n-1}|G>
/// at E_i^n - E_j^{n-1}, each broadened into a Lorentzian of HWHM Gamma.
inline Spectrum oracle_spectrum(int n_sites, const ChainParams& params, const ProbeState& state,
                                std::span<const double> freq_grid) {
    check_sites(n_sites, max_spectrum_sites);
    if (!(params.gamma_over_b > 0.0)) throw ConfigError("the Lorentzian spectrum needs gamma_over_b > 0");
    Spectrum out;
    out.frequencies.assign(freq_grid.begin(), freq_grid.end());
    out.values.assign(freq_grid.size(), 0.0);
    if (mean_photon_number(state) == 0.0) return out;

    const GroundState g = even_parity_ground_state(build_dense(n_sites, params.lambda));
    std::vector<BranchEigensystem> branches;
    for (int n = 0; n <= state.n_max(); ++n) {
        branches.push_back(diagonalize_branch(n_sites, branch_lambda(params, n), g.vector));
    }
    constexpr double negligible = 1e-14;
    struct Line {
        double center, weight;
    };
    for (int n = 1; n <= state.n_max(); ++n) {
        const double w = state.branch_weight(n);
        if (!(w > 0.0)) continue;
        const auto& bn = branches[static_cast<std::size_t>(n)];
        const auto& bp = branches[static_cast<std::size_t>(n - 1)];
        const Eigen::MatrixXd overlap = bn.vectors.transpose() * bp.vectors;
        std::vector<Line> lines;
        for (Eigen::Index i = 0; i < bn.overlaps.size(); ++i) {
            if (std::abs(bn.overlaps(i)) < negligible) continue;
            for (Eigen::Index j = 0; j < bp.overlaps.size(); ++j) {
                if (std::abs(bp.overlaps(j)) < negligible) continue;
                const double p = w * bn.overlaps(i) * overlap(i, j) * bp.overlaps(j);
                lines.push_back({bn.energies(i) - bp.energies(j), p});
            }
        }
        for (std::size_t k = 0; k < freq_grid.size(); ++k) {
            double acc = 0.0;
            for (const auto& l : lines) acc += l.weight * lorentzian(freq_grid[k], l.center, params.gamma_over_b);
            out.values[k] += acc;
        }
    }
    return out;
}

} // namespace qpt::oracle
