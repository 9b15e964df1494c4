// model.hpp: chain parameters and the laboratory -> dimensionless mapping
//
// Energies are measured in units of the nearest-neighbour coupling B and
// times in units of 1/B everywhere downstream of this header.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qpt/errors.hpp"

namespace qpt {

struct ChainParams {
    int n_sites{1000};        // number of qubits N
    double lambda{1.0};       // transverse-field ratio B_x / B
    double g_over_b{0.0};     // probe coupling g / B
    double gamma_over_b{0.0}; // resonator decay Gamma / B

    void validate() const {
        if (n_sites < 2 || n_sites % 2 != 0) {
            throw ConfigError("n_sites must be an even integer >= 2, got " + std::to_string(n_sites));
        }
        auto check = [](double v, const char* name) {
            if (!std::isfinite(v) || v < 0.0) {
                throw ConfigError(std::string(name) + " must be finite and non-negative");
            }
        };
        check(lambda, "lambda");
        check(g_over_b, "g_over_b");
        check(gamma_over_b, "gamma_over_b");
    }

    [[nodiscard]] ChainParams with_lambda(double lam) const {
        ChainParams p = *this;
        p.lambda = lam;
        return p;
    }
};

/// Transverse-field ratio of the chain when the resonator holds n photons.
/// Affine in n with slope -2 g/B; negative values are allowed.
inline double branch_lambda(const ChainParams& params, int n) {
    return params.lambda - (2.0 * n + 1.0) * params.g_over_b;
}

// Laboratory-side description of the device.
struct PhysicalParams {
    double e_j{13.0};                    // single-junction Josephson energy, GHz
    double c_sigma{600.0};               // total island capacitance, aF
    double c_m{30.0};                    // coupling capacitance, aF
    double tlr_length{1.0};              // resonator length, cm
    double squid_area{10.0};             // SQUID loop area, um^2
    double distance{1.0};                // qubit-resonator distance, um
    double inductance_per_length{4e-7};  // H/m
    double omega{120.0};                 // resonator mode frequency, GHz
    double flux_bias{0.0};               // Phi_x in units of Phi_0
};

struct DerivedParams {
    ChainParams chain;
    double b_ghz{};        // e^2 C_m / C_Sigma^2, expressed as a frequency
    double b_x_ghz{};      // E_J cos(pi Phi_x / Phi_0) / 2
    double eta{};          // dimensionless flux coupling
    double g_ghz{};        // eta * E_J
    double nominal_b_ghz{};
    double b_ratio_to_nominal{};
    std::vector<std::string> warnings;
};

namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge); // Wb
// Nominal B quoted for the reference device (C_Sigma = 600 aF, C_m = 30 aF).
inline constexpr double nominal_b_ghz = 1.6;
} // namespace constants

inline double coupling_strength(double eta, double e_j) { return eta * e_j; }

inline DerivedParams derive_chain_params(const PhysicalParams& p, int n_sites, double gamma_ghz) {
    const struct {
        double value;
        const char* name;
    } positive[] = {{p.e_j, "e_j"},
                    {p.c_sigma, "c_sigma"},
                    {p.c_m, "c_m"},
                    {p.tlr_length, "tlr_length"},
                    {p.squid_area, "squid_area"},
                    {p.distance, "distance"},
                    {p.inductance_per_length, "inductance_per_length"},
                    {p.omega, "omega"}};
    for (const auto& f : positive) {
        if (!std::isfinite(f.value) || f.value <= 0.0) {
            throw ConfigError(std::string("physical.") + f.name + " must be positive");
        }
    }
    if (!std::isfinite(p.flux_bias) || p.flux_bias < 0.0 || p.flux_bias > 0.5) {
        throw ConfigError("physical.flux_bias must lie in [0, 1/2]");
    }
    if (!std::isfinite(gamma_ghz) || gamma_ghz < 0.0) {
        throw ConfigError("physical.gamma must be non-negative");
    }
    if (p.c_m >= p.c_sigma) {
        throw ConfigError("physical.c_m must be smaller than physical.c_sigma (nearest-neighbour truncation)");
    }

    using namespace constants;
    constexpr double aF = 1e-18;
    const double b_joule = elementary_charge * elementary_charge * (p.c_m * aF) / std::pow(p.c_sigma * aF, 2);

    DerivedParams d;
    d.b_ghz = b_joule / planck / 1e9;
    d.b_x_ghz = p.e_j * std::cos(std::numbers::pi * p.flux_bias) / 2.0;
    if (p.flux_bias == 0.5) d.b_x_ghz = 0.0;

    const double angular = 2.0 * std::numbers::pi * p.omega * 1e9; // rad/s
    const double s_over_d = (p.squid_area * 1e-12) / (p.distance * 1e-6);                                   // m
    const double flux = s_over_d * std::sqrt(hbar * p.inductance_per_length * angular / (p.tlr_length * 1e-2)); // Wb
    d.eta = std::numbers::pi * flux / flux_quantum;
    d.g_ghz = coupling_strength(d.eta, p.e_j);
    d.nominal_b_ghz = nominal_b_ghz;
    d.b_ratio_to_nominal = d.b_ghz / nominal_b_ghz;

    d.chain.n_sites = n_sites;
    d.chain.lambda = d.b_x_ghz / d.b_ghz;
    d.chain.g_over_b = d.g_ghz / d.b_ghz;
    d.chain.gamma_over_b = gamma_ghz / d.b_ghz;
    d.chain.validate();

    // Rotating-wave regime needs omega >> max(B_x, B).
    if (p.omega < 10.0 * std::max(d.b_x_ghz, d.b_ghz)) {
        d.warnings.emplace_back("resonator frequency is not >> max(B_x, B); rotating-wave terms may matter");
    }
    return d;
}

} // namespace qpt
