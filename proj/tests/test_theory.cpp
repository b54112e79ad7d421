#include <doctest.h>

#include <cmath>
#include <random>

#include "cda/bench.hpp"
#include "cda/compression.hpp"
#include "cda/datasets.hpp"
#include "cda/discriminant.hpp"
#include "cda/rng.hpp"
#include "cda/theory.hpp"
#include "support/oracles.hpp"

using namespace cda;

TEST_SUITE_BEGIN("theory");

TEST_CASE("stdnormal_cdf matches the series oracle") {
    for (double x : {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.5}) {
        CHECK(stdnormal_cdf(x) == doctest::Approx(oracle::normal_cdf(x)).epsilon(1e-13));
    }
}

TEST_CASE("bayes_error") {
    SUBCASE("coincident means are indistinguishable") {
        PopulationModel pop = make_gauss_population(3, 0.0);
        CHECK(bayes_error(pop) == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("unit separation") {
        // Phi(-1), frozen from a high-precision evaluation
        PopulationModel pop = make_gauss_population(4, 1.0);
        CHECK(bayes_error(pop) == doctest::Approx(0.15865525393145705).epsilon(1e-12));
    }
    SUBCASE("scalar population wires delta correctly") {
        PopulationModel pop;
        pop.sigma1 = SymMatrix::identity(1);
        pop.mu1 = {1.0};
        pop.mu2 = {-1.0};
        CHECK(bayes_error(pop) == doctest::Approx(0.15865525393145705).epsilon(1e-12));
    }
    SUBCASE("unequal priors are rejected") {
        PopulationModel pop = make_gauss_population(2, 1.0);
        pop.prior1 = 0.4;
        pop.prior2 = 0.6;
        CHECK_THROWS_AS(bayes_error(pop), UnequalPriors);
    }
}

TEST_CASE("plug-in identity: true parameters recover the Bayes rate") {
    // random SPD covariance, d = delta, S_c = Sigma, xbar_g = mu_g
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    const int p = 3;
    Matrix a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = gauss(rng);
    PopulationModel pop;
    pop.sigma1 = SymMatrix(p);
    pop.sigma1.rank_update(a, 1.0);
    for (int i = 0; i < p; ++i) pop.sigma1.add(i, i, 0.5);
    pop.mu1 = {1.0, -0.5, 2.0};
    pop.mu2 = {-1.0, 0.5, 1.0};

    const double r_c = compressed_rule_error(pop, pop.delta(), pop.sigma1, pop.mu1, pop.mu2);
    CHECK(std::abs(r_c - bayes_error(pop)) <= 1e-12);
}

TEST_CASE("compressed_rule_error rejects a zero direction") {
    PopulationModel pop = make_gauss_population(2, 1.0);
    const std::vector<double> zero = {0.0, 0.0};
    CHECK_THROWS_AS(
        compressed_rule_error(pop, zero, pop.sigma1, pop.mu1, pop.mu2), ZeroDirection);
}

TEST_CASE("compressed_rule_error regression values under rescaled d") {
    // The formula is not claimed invariant to rescaling d; freeze both values.
    PopulationModel pop = make_gauss_population(2, 4.0);
    SymMatrix s_c = SymMatrix::identity(2);
    s_c.set(0, 1, 0.2);
    s_c.set(0, 0, 1.3);
    const std::vector<double> xbar1 = {1.45, 0.05};
    const std::vector<double> xbar2 = {-1.40, -0.02};
    const std::vector<double> d = {1.41, 0.03};
    std::vector<double> d2 = d;
    for (double& v : d2) v *= 2.0;

    const double r1 = compressed_rule_error(pop, d, s_c, xbar1, xbar2);
    const double r2 = compressed_rule_error(pop, d2, s_c, xbar1, xbar2);
    // frozen after validating the formula against the Monte-Carlo oracle below;
    // rescaling d moves the implied thresholds, so r2 != r1 (and r2 may even
    // undercut the Bayes rate, since 2d is inconsistent with these xbar_g)
    CHECK(r1 == doctest::Approx(0.12753745060446536).epsilon(1e-12));
    CHECK(r2 == doctest::Approx(0.0058344825130386907).epsilon(1e-12));
    CHECK(r1 != r2);
}

TEST_CASE("compressed_rule_error agrees with Monte-Carlo classification error") {
    // 2-D population, one fitted compressed covariance; compare the exact
    // formula against simulated test error of the same rule.
    PopulationModel pop;
    pop.sigma1 = SymMatrix::identity(2);
    pop.sigma1.set(0, 1, 0.3);
    pop.mu1 = {1.0, 0.3};
    pop.mu2 = {-1.0, -0.3};

    const LabeledDataset train = synthesize_gaussian(pop, 2000, 777);
    const ClassStatistics st = class_statistics(train);
    const auto [m1, m2] = split_compression_sizes(st.n1, st.n2, 60);
    const auto q1 = sample_compression_matrix(MatrixFamily::SparseRademacher, m1, st.n1, 0.1, 1);
    const auto q2 = sample_compression_matrix(MatrixFamily::SparseRademacher, m2, st.n2, 0.1, 2);
    const CompressedClassData c1 = compress_class(train.class_submatrix(1), st.mean1, q1, 1);
    const CompressedClassData c2 = compress_class(train.class_submatrix(2), st.mean2, q2, 2);
    SymMatrix s_c = compressed_within_class_covariance(c1, c2, st);
    for (int i = 0; i < 2; ++i) s_c.add(i, i, 1e-8);

    const double r_c =
        compressed_rule_error(pop, st.mean_difference, s_c, st.mean1, st.mean2);

    // simulate the rule: class 1 iff u'(x - xbar) >= 0, xbar = (xbar1+xbar2)/2
    const std::vector<double> u = ridge_solve(s_c, 0.0, st.mean_difference);
    std::vector<double> xbar(2);
    for (int j = 0; j < 2; ++j) xbar[j] = 0.5 * (st.mean1[j] + st.mean2[j]);
    const std::int64_t trials = 1000000;
    const LabeledDataset test = synthesize_gaussian(pop, trials, 778);
    std::int64_t wrong = 0;
    for (std::int64_t i = 0; i < test.n(); ++i) {
        double z = 0.0;
        for (int j = 0; j < 2; ++j) z += u[j] * (test.features(i, j) - xbar[j]);
        const int pred = z >= 0.0 ? 1 : 2;
        if (pred != test.labels[static_cast<std::size_t>(i)]) ++wrong;
    }
    const double mc = static_cast<double>(wrong) / static_cast<double>(trials);
    const double tol = 3.0 * std::sqrt(r_c * (1.0 - r_c) / static_cast<double>(trials));
    CHECK(std::abs(r_c - mc) <= tol + 1e-4); // small slack for the rounded class split
}

TEST_CASE("subgaussian_norm_Ks frozen values and monotonicity") {
    // 1/(0.5 ln 3) and 1/(0.01 ln 101), high-precision evaluations
    const double k05 = subgaussian_norm_Ks(0.5);
    CHECK(k05 * k05 == doctest::Approx(1.8204784532536748).epsilon(1e-12));
    const double k001 = subgaussian_norm_Ks(0.01);
    CHECK(k001 * k001 == doctest::Approx(21.667906533553168).epsilon(1e-12));

    double prev = subgaussian_norm_Ks(0.001);
    for (double s = 0.01; s <= 0.8; s += 0.01) {
        const double cur = subgaussian_norm_Ks(s);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS_AS(subgaussian_norm_Ks(0.0), InvalidSparsity);
    CHECK_THROWS_AS(subgaussian_norm_Ks(1.0), InvalidSparsity);
}

TEST_CASE("deviation_bound") {
    PopulationModel pop = make_gauss_population(10, 1.0);
    SUBCASE("quadrupling m halves the bound") {
        const double b1 = deviation_bound(pop, 0.05, 500, 10, 0.05);
        const double b2 = deviation_bound(pop, 0.05, 2000, 10, 0.05);
        CHECK(b2 == doctest::Approx(0.5 * b1).epsilon(1e-12));
    }
    SUBCASE("separation sends the bound to zero") {
        double prev = deviation_bound(make_gauss_population(10, 1.0), 0.05, 500, 10, 0.05);
        for (double d2 : {4.0, 16.0, 64.0}) {
            const double cur = deviation_bound(make_gauss_population(10, d2), 0.05, 500, 10, 0.05);
            CHECK(cur < prev);
            prev = cur;
        }
        CHECK(prev < 1e-10);
    }
    SUBCASE("hand-chained evaluation") {
        // phi(1)*2 * Ks^2(0.01) * sqrt((ln 20 + 10)/1000), frozen via a
        // high-precision evaluation
        const double b = deviation_bound(make_gauss_population(10, 1.0), 0.01, 1000, 10, 0.05);
        CHECK(b == doctest::Approx(1.1953914686148166).epsilon(1e-12));
    }
    SUBCASE("invalid eta") {
        CHECK_THROWS_AS(deviation_bound(pop, 0.05, 500, 10, 0.0), InvalidEta);
        CHECK_THROWS_AS(deviation_bound(pop, 0.05, 500, 10, 1.0), InvalidEta);
    }
}

TEST_CASE("Bayes optimality: fitted rules never beat the Bayes rate") {
    PopulationModel pop = make_gauss_population(4, 2.0);
    const double r_opt = bayes_error(pop);
    for (int rep = 0; rep < 20; ++rep) {
        const LabeledDataset data =
            synthesize_gaussian(pop, 400, derive_seed(33, {static_cast<std::uint64_t>(rep)}));
        const ClassStatistics st = class_statistics(data);
        const auto [m1, m2] = split_compression_sizes(st.n1, st.n2, 60);
        const auto q1 = sample_compression_matrix(
            MatrixFamily::SparseRademacher, m1, st.n1, 0.2,
            derive_seed(34, {static_cast<std::uint64_t>(rep), 1}));
        const auto q2 = sample_compression_matrix(
            MatrixFamily::SparseRademacher, m2, st.n2, 0.2,
            derive_seed(34, {static_cast<std::uint64_t>(rep), 2}));
        SymMatrix s_c = compressed_within_class_covariance(
            compress_class(data.class_submatrix(1), st.mean1, q1, 1),
            compress_class(data.class_submatrix(2), st.mean2, q2, 2), st);
        for (int i = 0; i < 4; ++i) s_c.add(i, i, 1e-6);
        const double r_c =
            compressed_rule_error(pop, st.mean_difference, s_c, st.mean1, st.mean2);
        CHECK(r_opt <= r_c + 1e-12);
    }
}

TEST_CASE("median |R_c - R_opt| decays inside the deviation envelope") {
    // The deviation bound gives an m^{-1/2} upper envelope; the realized median
    // decays faster (~m^{-1}) because the rule's excess risk is second order
    // in the covariance perturbation. Assert decay at least as fast as the
    // envelope and dominance of the bound at C = 1.
    BoundCurveConfig cfg;
    cfg.p = 10;
    cfg.delta2 = 4.0;
    cfg.n = 40000;
    cfg.replications = 20; // the acceptance suite runs the full 50
    cfg.s = 0.02;
    cfg.m_grid = {100, 200, 400, 800, 1600, 3200};
    cfg.master_seed = 99;
    const std::vector<BoundCurvePoint> pts = bound_curve(cfg);
    std::vector<double> lx, ly;
    for (const BoundCurvePoint& pt : pts) {
        lx.push_back(std::log(static_cast<double>(pt.m)));
        ly.push_back(std::log(pt.median_abs_err));
        CHECK(pt.bound > pt.median_abs_err);
    }
    const double slope = oracle::ls_slope(lx, ly);
    INFO("slope = ", slope);
    CHECK(slope <= -0.35);
}

TEST_SUITE_END();
