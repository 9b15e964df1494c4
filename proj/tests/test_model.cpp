#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qpt/model.hpp"

using namespace qpt;

TEST(BranchLambda, ZeroCouplingLeavesLambda) {
    ChainParams p{1000, 1.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(branch_lambda(p, 7), 1.0);
}

TEST(BranchLambda, ReferenceDeviceVacuumBranch) {
    // g = 0.13 GHz, B = 1.6 GHz
    ChainParams p{1000, 1.0, 0.13 / 1.6, 0.0};
    EXPECT_NEAR(branch_lambda(p, 0), 0.91875, 1e-15);
}

TEST(BranchLambda, AffineWithSlopeMinusTwoG) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(0.0, 5.0), g(0.0, 0.5);
    for (int trial = 0; trial < 200; ++trial) {
        ChainParams p{8, lam(rng), g(rng), 0.01};
        for (int n = 1; n < 20; ++n) {
            EXPECT_NEAR(branch_lambda(p, n) - branch_lambda(p, n - 1), -2.0 * p.g_over_b, 1e-14);
        }
    }
}

TEST(BranchLambda, NegativeValuesAllowed) {
    ChainParams p{4, 0.1, 0.2, 0.0};
    EXPECT_LT(branch_lambda(p, 3), 0.0);
}

TEST(ChainParams, RejectsOddOrTinyChains) {
    EXPECT_THROW((ChainParams{7, 1.0, 0.0, 0.0}.validate()), ConfigError);
    EXPECT_THROW((ChainParams{0, 1.0, 0.0, 0.0}.validate()), ConfigError);
    EXPECT_NO_THROW((ChainParams{2, 1.0, 0.0, 0.0}.validate()));
}

TEST(ChainParams, RejectsNegativeOrNonFinite) {
    EXPECT_THROW((ChainParams{8, -1.0, 0.0, 0.0}.validate()), ConfigError);
    EXPECT_THROW((ChainParams{8, 1.0, NAN, 0.0}.validate()), ConfigError);
    EXPECT_THROW((ChainParams{8, 1.0, 0.0, INFINITY}.validate()), ConfigError);
}

TEST(DeriveChainParams, CouplingFromEta) {
    EXPECT_NEAR(coupling_strength(0.01, 13.0), 0.13, 1e-15);
}

TEST(DeriveChainParams, ReferenceCapacitancesGiveFormulaB) {
    // e^2 * 30 aF / (600 aF)^2 / h, evaluated at 30 digits
    const auto d = derive_chain_params(PhysicalParams{}, 500, 6.3e-3);
    EXPECT_NEAR(d.b_ghz, 3.22837155410985, 1e-12);
    EXPECT_NEAR(d.b_ratio_to_nominal, 2.01773222131866, 1e-12);
    EXPECT_DOUBLE_EQ(d.nominal_b_ghz, 1.6);
    EXPECT_NEAR(d.chain.lambda, d.b_x_ghz / d.b_ghz, 1e-15);
    EXPECT_NEAR(d.chain.g_over_b, d.g_ghz / d.b_ghz, 1e-15);
    EXPECT_NEAR(d.g_ghz, d.eta * 13.0, 1e-15);
    EXPECT_NEAR(d.chain.gamma_over_b, 6.3e-3 / d.b_ghz, 1e-15);
    EXPECT_EQ(d.chain.n_sites, 500);
}

TEST(DeriveChainParams, HalfFluxQuantumSwitchesOffTransverseField) {
    PhysicalParams p;
    p.flux_bias = 0.5;
    const auto d = derive_chain_params(p, 8, 0.0);
    EXPECT_EQ(d.b_x_ghz, 0.0);
    EXPECT_EQ(d.chain.lambda, 0.0);
}

TEST(DeriveChainParams, ZeroFluxGivesHalfJosephsonEnergy) {
    const auto d = derive_chain_params(PhysicalParams{}, 8, 0.0);
    EXPECT_NEAR(d.b_x_ghz, 6.5, 1e-14);
}

TEST(DeriveChainParams, JosephsonScalingKeepsLambdaOverCoupling) {
    PhysicalParams p;
    p.flux_bias = 0.2;
    const auto a = derive_chain_params(p, 8, 0.0);
    p.e_j *= 2.0;
    const auto b = derive_chain_params(p, 8, 0.0);
    EXPECT_NEAR(b.chain.lambda, 2.0 * a.chain.lambda, 1e-13);
    EXPECT_NEAR(b.chain.g_over_b, 2.0 * a.chain.g_over_b, 1e-13);
    EXPECT_NEAR(b.chain.lambda / b.chain.g_over_b, a.chain.lambda / a.chain.g_over_b, 1e-12);
}

TEST(DeriveChainParams, RejectsNonPositiveInputs) {
    PhysicalParams p;
    p.c_sigma = 0.0;
    EXPECT_THROW(derive_chain_params(p, 8, 0.0), ConfigError);
    p = PhysicalParams{};
    p.e_j = -1.0;
    EXPECT_THROW(derive_chain_params(p, 8, 0.0), ConfigError);
    p = PhysicalParams{};
    p.flux_bias = 0.7;
    EXPECT_THROW(derive_chain_params(p, 8, 0.0), ConfigError);
}

TEST(DeriveChainParams, RejectsCouplingCapacitanceAboveTotal) {
    PhysicalParams p;
    p.c_m = 600.0;
    EXPECT_THROW(derive_chain_params(p, 8, 0.0), ConfigError);
}

TEST(DeriveChainParams, WarnsOutsideRotatingWaveRegime) {
    PhysicalParams p;
    p.omega = 5.0;
    const auto d = derive_chain_params(p, 8, 0.0);
    EXPECT_FALSE(d.warnings.empty());
    EXPECT_TRUE(derive_chain_params(PhysicalParams{}, 8, 0.0).warnings.empty());
}
