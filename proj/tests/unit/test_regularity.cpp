#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "derham/presets.hpp"
#include "derham/regularity.hpp"

using namespace derham;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const double kLog2_3 = std::log2(3.0);

}  // namespace

TEST(Integrand, BernoulliFirstBranch) {
    const auto v = integrand_at(presets::bernoulli({0.25, 0.75}), MadicDigits(2, {0, 1, 1}), 20);
    EXPECT_DOUBLE_EQ(v.neg_log_norm, 2.0);
    EXPECT_DOUBLE_EQ(v.log_inv_norm, 2.0);
}

TEST(Integrand, CantorConstantBranchIsInfinite) {
    const auto v = integrand_at(presets::cantor(), MadicDigits(3, {1, 0}), 10);
    EXPECT_EQ(v.neg_log_norm, kInf);
    EXPECT_EQ(v.log_inv_norm, kInf);
}

TEST(Integrand, AnisotropicRankOneBranch) {
    const auto v = integrand_at(presets::anisotropic(), MadicDigits(2, {1, 0}), 10);
    EXPECT_DOUBLE_EQ(v.neg_log_norm, 1.0);
    EXPECT_EQ(v.log_inv_norm, kInf);
    const auto w = integrand_at(presets::anisotropic(), MadicDigits(2, {0}), 10);
    EXPECT_DOUBLE_EQ(w.neg_log_norm, 1.0);
    EXPECT_NEAR(w.log_inv_norm, kLog2_3, 1e-15);
}

TEST(Integrand, NeedsADigit) {
    EXPECT_THROW(integrand_at(presets::cantor(), MadicDigits(3), 5), DomainError);
}

TEST(Quadrature, FairBernoulliExact) {
    const auto e = alpha_beta_quadrature(presets::bernoulli({0.5, 0.5}), 1);
    EXPECT_EQ(e.alpha, 1.0);
    EXPECT_EQ(e.beta, 1.0);
    EXPECT_EQ(e.method, Method::quadrature);
    EXPECT_FALSE(e.stderr_alpha.has_value());
}

TEST(Quadrature, OkamotoDepthOne) {
    const auto e = alpha_beta_quadrature(presets::okamoto(0.2, 0.6), 1);
    EXPECT_NEAR(e.alpha, -std::log(0.2 * 0.4 * 0.4) / std::log(3.0) / 3.0, 1e-12);
    EXPECT_NEAR(e.alpha, 1.044354, 1e-6);
}

TEST(Quadrature, CantorInfinite) {
    const auto e = alpha_beta_quadrature(presets::cantor(), 1);
    EXPECT_EQ(e.alpha, kInf);
    EXPECT_EQ(e.beta, kInf);
}

TEST(Quadrature, AnisotropicAlphaOneBetaInfinite) {
    const auto e = alpha_beta_quadrature(presets::anisotropic(), 6);
    EXPECT_NEAR(e.alpha, 1.0, 1e-12);
    EXPECT_EQ(e.beta, kInf);
}

// Constant-Jacobian systems: the answer does not depend on depth or eval_depth.
TEST(Quadrature, LinearSystemsIndependentOfDepth) {
    const std::vector<DeRhamSystem> systems = {presets::bernoulli({0.25, 0.75}), presets::bernoulli({0.2, 0.3, 0.5}),
                                               presets::okamoto(0.2, 0.6), presets::koch(),
                                               presets::derham({0.3, 0.3})};
    for (const auto& sys : systems) {
        const auto ref = alpha_beta_quadrature(sys, 1);
        for (int depth : {2, 5, 8}) {
            for (int eval : {0, depth, depth + 5}) {
                const auto e = alpha_beta_quadrature(sys, depth, eval);
                EXPECT_NEAR(e.alpha, ref.alpha, 1e-12) << sys.name();
                EXPECT_NEAR(e.beta, ref.beta, 1e-12) << sys.name();
            }
        }
    }
}

TEST(Quadrature, AlphaAtMostBeta) {
    const std::vector<DeRhamSystem> systems = {presets::minkowski_inverse(), presets::cubic(), presets::quadratic(),
                                               presets::anisotropic(), presets::koch(), presets::cantor(),
                                               presets::perturbed_minkowski(0.05)};
    for (const auto& sys : systems) {
        const auto e = alpha_beta_quadrature(sys, 8);
        EXPECT_LE(e.alpha, e.beta) << sys.name();
        EXPECT_GE(e.alpha, 0.0) << sys.name();
    }
}

TEST(Quadrature, MinkowskiStableAcrossDepths) {
    const auto sys = presets::minkowski_inverse();
    double prev = alpha_beta_quadrature(sys, 8).alpha;
    for (int depth = 9; depth <= 14; ++depth) {
        const double a = alpha_beta_quadrature(sys, depth).alpha;
        EXPECT_NEAR(a, prev, 0.01) << depth;
        EXPECT_GT(a, 1.0);
        EXPECT_LE(a, std::log2(9.0 / 4.0));
        prev = a;
    }
}

TEST(Quadrature, CubicAboveLowerBound) {
    const auto e = alpha_beta_quadrature(presets::cubic(), 10);
    EXPECT_GE(e.alpha, 0.25 * std::log2(81.0 / 5.0));
}

TEST(Quadrature, QuadraticGrowsWithDepth) {
    const auto sys = presets::quadratic();
    double prev = 0.0;
    for (int depth : {4, 6, 8, 10}) {
        const double a = alpha_beta_quadrature(sys, depth).alpha;
        EXPECT_GT(a, prev) << depth;
        EXPECT_TRUE(std::isfinite(a));
        prev = a;
    }
}

TEST(Quadrature, Preconditions) {
    EXPECT_THROW(alpha_beta_quadrature(presets::cantor(), 0), DomainError);
    EXPECT_THROW(alpha_beta_quadrature(presets::koch(), 6, 4), DomainError);
    EXPECT_THROW(alpha_beta_quadrature(presets::koch(), 25), ResourceError);
}

TEST(MonteCarlo, FairBernoulliZeroStderr) {
    const auto e = alpha_beta_monte_carlo(presets::bernoulli({0.5, 0.5}), 1000, 10, 0, 99);
    EXPECT_EQ(e.alpha, 1.0);
    EXPECT_EQ(*e.stderr_alpha, 0.0);
    EXPECT_EQ(e.seed, 99u);
    EXPECT_EQ(e.samples, 1000u);
}

TEST(MonteCarlo, KochExact) {
    const auto e = alpha_beta_monte_carlo(presets::koch(), 2000, 12, 0, 1);
    EXPECT_NEAR(e.alpha, kLog2_3 / 2.0, 1e-12);
    EXPECT_NEAR(*e.stderr_alpha, 0.0, 1e-12);
}

TEST(MonteCarlo, MinkowskiInRange) {
    const auto e = alpha_beta_monte_carlo(presets::minkowski_inverse(), 20000, 30, 0, 42);
    EXPECT_GT(e.alpha, 1.0);
    EXPECT_LE(e.alpha, std::log2(9.0 / 4.0));
    EXPECT_GT(*e.stderr_alpha, 0.0);
    EXPECT_NEAR(e.alpha, alpha_beta_quadrature(presets::minkowski_inverse(), 12).alpha, 4.0 * *e.stderr_alpha);
}

TEST(MonteCarlo, BitReproducibleAcrossThreadCounts) {
    const auto sys = presets::minkowski_inverse();
    ::setenv("DERHAM_THREADS", "1", 1);
    const auto one = alpha_beta_monte_carlo(sys, 5000, 20, 0, 7);
    ::setenv("DERHAM_THREADS", "4", 1);
    const auto four = alpha_beta_monte_carlo(sys, 5000, 20, 0, 7);
    const auto again = alpha_beta_monte_carlo(sys, 5000, 20, 0, 7);
    ::unsetenv("DERHAM_THREADS");
    EXPECT_EQ(one.alpha, four.alpha);
    EXPECT_EQ(one.beta, four.beta);
    EXPECT_EQ(*one.stderr_alpha, *four.stderr_alpha);
    EXPECT_EQ(four.alpha, again.alpha);
}

TEST(MonteCarlo, SeedsDiffer) {
    const auto sys = presets::minkowski_inverse();
    EXPECT_NE(alpha_beta_monte_carlo(sys, 500, 20, 0, 1).alpha, alpha_beta_monte_carlo(sys, 500, 20, 0, 2).alpha);
}

TEST(EmpiricalExponent, FairBernoulliAllOne) {
    const auto tr = empirical_exponent(presets::bernoulli({0.5, 0.5}), 3, 200);
    ASSERT_EQ(tr.values.size(), 200u);
    for (double v : tr.values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(EmpiricalExponent, KochConstant) {
    const auto tr = empirical_exponent(presets::koch(), 5, 300);
    for (double v : tr.values) EXPECT_NEAR(v, kLog2_3 / 2.0, 1e-12);
}

TEST(EmpiricalExponent, CantorHitsInfinity) {
    // Any digit 1 in the prefix makes M_n = 0.
    const auto tr = empirical_exponent(presets::cantor(), 1, 50);
    EXPECT_EQ(tr.values.back(), kInf);
}

TEST(EmpiricalExponent, MinkowskiTracksAlpha) {
    const auto sys = presets::minkowski_inverse();
    const auto tr = empirical_exponent(sys, 7, 2000);
    const auto mc = alpha_beta_monte_carlo(sys, 20000, 30, 0, 42);
    EXPECT_NEAR(tr.values.back(), mc.alpha, 0.05);
}

TEST(Variation, MonotoneSystemsTelescope) {
    for (const auto& sys : {presets::minkowski_inverse(), presets::cubic(), presets::okamoto(0.2, 0.6)}) {
        const auto vt = p_variation_table(sys, 1.0, sys.base() == 2 ? 12 : 8);
        for (double s : vt.sums) EXPECT_NEAR(s, 1.0, 1e-10) << sys.name();
    }
}

TEST(Variation, KochGeometric) {
    const auto vt = p_variation_table(presets::koch(), 1.0, 16);
    for (std::size_t k = 0; k < vt.sums.size(); ++k) {
        EXPECT_NEAR(vt.sums[k], std::pow(2.0 / std::sqrt(3.0), static_cast<double>(k + 1)),
                    1e-12 * vt.sums[k]);
    }
}

// Sum over all 2^n cells of M_n^2 is (a_0^2 + a_1^2)^n; brute force via increment_Mn too.
TEST(Variation, BernoulliSquares) {
    const auto sys = presets::bernoulli({0.25, 0.75});
    const auto vt = p_variation_table(sys, 2.0, 10);
    for (int n = 1; n <= 10; ++n) {
        double brute = 0.0;
        for (std::uint64_t k = 0; k < (1u << n); ++k) brute += std::pow(increment_Mn(sys, digits_from_index(k, 2, n)), 2);
        EXPECT_NEAR(vt.sums[n - 1], brute, 1e-14);
        EXPECT_NEAR(vt.sums[n - 1], std::pow(0.625, n), 1e-14);
    }
}

TEST(Variation, DivergesBelowInverseBeta) {
    for (const auto& sys : {presets::koch(), presets::derham({0.3, 0.3})}) {
        const double beta = alpha_beta_quadrature(sys, 1).beta;
        ASSERT_LT(beta, 1.0);
        const auto vt = p_variation_table(sys, 0.95 / beta, 16);
        for (std::size_t n = 4; n < vt.sums.size(); ++n) EXPECT_GT(vt.sums[n], vt.sums[n - 1]) << sys.name();
    }
}

TEST(Classify, Examples) {
    RegularityEstimate e;
    e.alpha = e.beta = kInf;
    EXPECT_EQ(classify(e, 0.0).tag, Verdict::derivative_zero_ae);
    e.alpha = e.beta = kLog2_3 / 2.0;
    EXPECT_EQ(classify(e, 0.01).tag, Verdict::nondifferentiable_ae);
    e.alpha = e.beta = 1.0;
    EXPECT_EQ(classify(e, 0.0).tag, Verdict::inconclusive);
    e.alpha = 1.005;
    EXPECT_EQ(classify(e, 0.01).tag, Verdict::inconclusive);
    EXPECT_THROW(classify(e, -1.0), DomainError);
}

TEST(Classify, DefaultMargins) {
    const auto cantor = presets::cantor();
    const auto c = alpha_beta_quadrature(cantor, 4);
    EXPECT_EQ(default_margin(cantor, c), 0.0);
    EXPECT_EQ(classify(c, default_margin(cantor, c)).tag, Verdict::derivative_zero_ae);

    const auto koch = presets::koch();
    const auto k = alpha_beta_quadrature(koch, 8);
    EXPECT_NEAR(default_margin(koch, k), 0.0, 1e-12);
    EXPECT_EQ(classify(k, default_margin(koch, k)).tag, Verdict::nondifferentiable_ae);

    const auto mink = presets::minkowski_inverse();
    const auto mc = alpha_beta_monte_carlo(mink, 2000, 20, 0, 3);
    EXPECT_DOUBLE_EQ(default_margin(mink, mc), 3.0 * std::max(*mc.stderr_alpha, *mc.stderr_beta));
}
