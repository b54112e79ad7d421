#include <doctest.h>

#include <cmath>
#include <random>

#include "cda/bench.hpp"
#include "cda/discriminant.hpp"
#include "cda/rng.hpp"

using namespace cda;

TEST_SUITE_BEGIN("discriminant");

namespace {

LabeledDataset tiny_dataset(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels) {
    Matrix feats(static_cast<std::int64_t>(rows.size()),
                 static_cast<std::int64_t>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            feats(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) = rows[i][j];
    return make_labeled_dataset(std::move(feats), labels, "test");
}

LabeledDataset gaussian_data(int p, std::int64_t n, double sep, double prior1,
                             std::uint64_t seed) {
    PopulationModel pop = make_gauss_population(p, sep);
    pop.prior1 = prior1;
    pop.prior2 = 1.0 - prior1;
    return synthesize_gaussian(pop, n, seed);
}

Matrix random_grid(int p, std::int64_t count, std::uint64_t seed, double spread = 3.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, spread);
    Matrix grid(count, p);
    for (std::int64_t i = 0; i < count; ++i)
        for (int j = 0; j < p; ++j) grid(i, j) = gauss(rng);
    return grid;
}

} // namespace

TEST_CASE("class_statistics mean difference scaling") {
    SUBCASE("one sample per class") {
        const LabeledDataset d = tiny_dataset({{2.0}, {0.0}}, {1, 2});
        const ClassStatistics st = class_statistics(d);
        CHECK(st.mean_difference[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("balanced classes halve the mean gap") {
        const LabeledDataset d = tiny_dataset({{3.0}, {5.0}, {1.0}, {1.0}}, {1, 1, 2, 2});
        const ClassStatistics st = class_statistics(d);
        // means 4 and 1, v = 3, d = v/2
        CHECK(st.mean_difference[0] == doctest::Approx(1.5).epsilon(1e-14));
    }
    SUBCASE("unbalanced 3:1") {
        const LabeledDataset d = tiny_dataset({{1.0}, {1.0}, {1.0}, {5.0}}, {1, 1, 1, 2});
        const ClassStatistics st = class_statistics(d);
        CHECK(st.mean_difference[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
    }
}

TEST_CASE("class_statistics overall mean identity") {
    const LabeledDataset d = gaussian_data(4, 300, 1.0, 0.4, 11);
    const ClassStatistics st = class_statistics(d);
    for (int j = 0; j < 4; ++j) {
        const double expect = (st.n1 * st.mean1[j] + st.n2 * st.mean2[j]) /
                              static_cast<double>(st.n1 + st.n2);
        CHECK(st.overall_mean[j] == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("within_class_covariance hand sum") {
    SUBCASE("constant classes give zero") {
        const LabeledDataset d = tiny_dataset({{3.0}, {3.0}, {-1.0}, {-1.0}}, {1, 1, 2, 2});
        const SymMatrix s = within_class_covariance(d, class_statistics(d));
        CHECK(s(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("1-D pooled scatter over n") {
        const LabeledDataset d = tiny_dataset({{0.0}, {2.0}, {5.0}, {5.0}}, {1, 1, 2, 2});
        const SymMatrix s = within_class_covariance(d, class_statistics(d));
        CHECK(s(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("trace of within covariance equals mean squared distance to own class mean") {
    const LabeledDataset d = gaussian_data(3, 200, 2.0, 0.5, 21);
    const ClassStatistics st = class_statistics(d);
    const SymMatrix s = within_class_covariance(d, st);
    double msd = 0.0;
    for (std::int64_t i = 0; i < d.n(); ++i) {
        const std::vector<double>& mean = (d.labels[static_cast<std::size_t>(i)] == 1 ? st.mean1
                                                                                      : st.mean2);
        for (std::int64_t j = 0; j < d.p(); ++j) {
            const double c = d.features(i, j) - mean[static_cast<std::size_t>(j)];
            msd += c * c;
        }
    }
    msd /= static_cast<double>(d.n());
    CHECK(s.trace() == doctest::Approx(msd).epsilon(1e-10));
}

namespace {

// Identity-permutation Q with s = 1/n_g, so compressed samples reduce to
// the originals and the compressed covariance collapses to the full one.
SparseCompressionMatrix identity_collapse_q(std::int64_t n_g) {
    std::vector<Triplet> t;
    for (std::int64_t i = 0; i < n_g; ++i) t.push_back({i, i, 1.0});
    return SparseCompressionMatrix(n_g, n_g, 1.0 / static_cast<double>(n_g),
                                   MatrixFamily::SparseRademacher, std::move(t), 0);
}

} // namespace

TEST_CASE("all-empty Q rows give a zero compressed covariance") {
    const LabeledDataset d = gaussian_data(3, 40, 1.0, 0.5, 31);
    const ClassStatistics st = class_statistics(d);
    // one triplet per class placed in row 0 with value canceling: use two
    // rows where every row is empty instead
    SparseCompressionMatrix q1(3, st.n1, 0.1, MatrixFamily::SparseRademacher, {}, 0);
    SparseCompressionMatrix q2(3, st.n2, 0.1, MatrixFamily::SparseRademacher, {}, 0);
    const CompressedClassData c1 =
        compress_class(d.class_submatrix(1), st.mean1, q1, 1);
    const CompressedClassData c2 =
        compress_class(d.class_submatrix(2), st.mean2, q2, 2);
    const SymMatrix s = compressed_within_class_covariance(c1, c2, st);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(s(i, j) == 0.0);
}

TEST_CASE("identity-collapse Q reproduces the full covariance and Full LDA labels") {
    const LabeledDataset d = gaussian_data(4, 120, 2.0, 0.5, 41);
    const ClassStatistics st = class_statistics(d);
    const SymMatrix full = within_class_covariance(d, st);

    const CompressedClassData c1 =
        compress_class(d.class_submatrix(1), st.mean1, identity_collapse_q(st.n1), 1);
    const CompressedClassData c2 =
        compress_class(d.class_submatrix(2), st.mean2, identity_collapse_q(st.n2), 2);
    const SymMatrix collapsed = compressed_within_class_covariance(c1, c2, st);

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(collapsed(i, j) == doctest::Approx(full(i, j)).epsilon(1e-10));

    const double gamma = 1e-6;
    const std::vector<double> beta_full = ridge_solve(full, gamma, st.mean_difference);
    const std::vector<double> beta_c = ridge_solve(collapsed, gamma, st.mean_difference);
    for (int j = 0; j < 4; ++j)
        CHECK(beta_c[j] == doctest::Approx(beta_full[j]).epsilon(1e-8));

    const LinearModel full_model = linear_model_from_covariance(
        LinearVariant::Full, beta_full, full, gamma, st.mean1, st.mean2, st.n1, st.n2);
    const LinearModel comp_model = linear_model_from_covariance(
        LinearVariant::Compressed, beta_c, collapsed, gamma, st.mean1, st.mean2, st.n1, st.n2);
    const Matrix grid = random_grid(4, 500, 42);
    for (std::int64_t i = 0; i < grid.rows(); ++i)
        CHECK(classify_linear(full_model, grid.row_span(i)) ==
              classify_linear(comp_model, grid.row_span(i)));
}

TEST_CASE("per-class compressed covariances recombine to the pooled one") {
    const LabeledDataset d = gaussian_data(3, 80, 1.0, 0.4, 51);
    const ClassStatistics st = class_statistics(d);
    const auto [m1, m2] = split_compression_sizes(st.n1, st.n2, 20);
    const auto q1 = sample_compression_matrix(MatrixFamily::SparseRademacher, m1, st.n1, 0.2, 1);
    const auto q2 = sample_compression_matrix(MatrixFamily::SparseRademacher, m2, st.n2, 0.2, 2);
    const CompressedClassData c1 = compress_class(d.class_submatrix(1), st.mean1, q1, 1);
    const CompressedClassData c2 = compress_class(d.class_submatrix(2), st.mean2, q2, 2);

    const SymMatrix pooled = compressed_within_class_covariance(c1, c2, st);
    const SymMatrix s1 = per_class_compressed_covariance(c1);
    const SymMatrix s2 = per_class_compressed_covariance(c2);
    const double m = static_cast<double>(m1 + m2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double combined = (m1 * s1(i, j) + m2 * s2(i, j)) / m;
            CHECK(pooled(i, j) == doctest::Approx(combined).epsilon(1e-12));
        }
}

TEST_CASE("Monte-Carlo mean of the compressed within covariance is the full one") {
    const LabeledDataset d = gaussian_data(3, 60, 1.5, 0.5, 61);
    const ClassStatistics st = class_statistics(d);
    const SymMatrix target = within_class_covariance(d, st);
    const Matrix x1 = d.class_submatrix(1);
    const Matrix x2 = d.class_submatrix(2);

    const int draws = 400;
    const std::int64_t m = 10;
    const auto [m1, m2] = split_compression_sizes(st.n1, st.n2, m);
    const int p = 3;
    SymMatrix sum(p), sumsq(p);
    for (int r = 0; r < draws; ++r) {
        const auto q1 = sample_compression_matrix(MatrixFamily::SparseRademacher, m1, st.n1, 0.3,
                                                  derive_seed(1000, {static_cast<std::uint64_t>(r), 1}));
        const auto q2 = sample_compression_matrix(MatrixFamily::SparseRademacher, m2, st.n2, 0.3,
                                                  derive_seed(1000, {static_cast<std::uint64_t>(r), 2}));
        const SymMatrix s = compressed_within_class_covariance(
            compress_class(x1, st.mean1, q1, 1), compress_class(x2, st.mean2, q2, 2), st);
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j) {
                sum.add(i, j, s(i, j));
                sumsq.add(i, j, s(i, j) * s(i, j));
            }
    }
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            const double mean = sum(i, j) / draws;
            const double var = sumsq(i, j) / draws - mean * mean;
            const double se = std::sqrt(std::max(var, 0.0) / draws);
            CHECK(std::abs(mean - target(i, j)) <= 5.0 * se + 1e-12);
        }
}

TEST_CASE("equal class means give beta = 0 and prior-only classification") {
    // both classes drawn around the same center, then means forced equal
    Matrix feats(6, 2);
    const double rows[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {2, 2}, {-2, -2}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 2; ++j) feats(i, j) = rows[i][j];
    const LabeledDataset d =
        make_labeled_dataset(std::move(feats), {1, 1, 2, 2, 2, 2}, "test");
    // classes 1 and 2 both have mean (0,0)
    const LinearModel model = fit_linear(d, LinearVariant::Full, {.gamma = 1e-8});
    CHECK(dot(model.beta, model.beta) == doctest::Approx(0.0).epsilon(1e-20));
    // prior2 = 2/3 > prior1: everything goes to class 2
    const Matrix grid = random_grid(2, 50, 7);
    for (std::int64_t i = 0; i < grid.rows(); ++i)
        CHECK(classify_linear(model, grid.row_span(i)) == 2);
}

TEST_CASE("classify_linear basics") {
    const LabeledDataset d = gaussian_data(3, 200, 3.0, 0.5, 71);
    const LinearModel model = fit_linear(d, LinearVariant::Full, {.gamma = 1e-8});
    SUBCASE("class means classify to their own class under equal priors") {
        CHECK(classify_linear(model, model.mean1) == 1);
        CHECK(classify_linear(model, model.mean2) == 2);
    }
    SUBCASE("projected midpoint is a tie, broken toward class 1") {
        std::vector<double> mid(3);
        for (int j = 0; j < 3; ++j) mid[j] = 0.5 * (model.mean1[j] + model.mean2[j]);
        CHECK(classify_linear(model, mid) == 1);
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(classify_linear(model, std::vector<double>{1.0, 2.0}),
                        DimensionMismatch);
    }
}

TEST_CASE("linear rule is invariant to positive rescaling of beta") {
    const LabeledDataset d = gaussian_data(4, 200, 2.0, 0.35, 81);
    const ClassStatistics st = class_statistics(d);
    const SymMatrix cov = within_class_covariance(d, st);
    std::vector<double> beta = ridge_solve(cov, 1e-6, st.mean_difference);
    std::vector<double> beta5 = beta;
    for (double& b : beta5) b *= 5.0;

    const LinearModel m1 = linear_model_from_covariance(LinearVariant::Full, beta, cov, 1e-6,
                                                        st.mean1, st.mean2, st.n1, st.n2);
    const LinearModel m5 = linear_model_from_covariance(LinearVariant::Full, beta5, cov, 1e-6,
                                                        st.mean1, st.mean2, st.n1, st.n2);
    const Matrix grid = random_grid(4, 400, 82);
    for (std::int64_t i = 0; i < grid.rows(); ++i)
        CHECK(classify_linear(m1, grid.row_span(i)) == classify_linear(m5, grid.row_span(i)));
}

TEST_CASE("raising the class-1 prior never flips a point away from class 1") {
    const LabeledDataset d = gaussian_data(3, 150, 1.0, 0.5, 91);
    const ClassStatistics st = class_statistics(d);
    const SymMatrix cov = within_class_covariance(d, st);
    const std::vector<double> beta = ridge_solve(cov, 1e-6, st.mean_difference);

    const Matrix grid = random_grid(3, 300, 92);
    std::vector<int> prev;
    for (std::int64_t n1 : {20, 50, 80, 110, 140}) {
        const LinearModel model = linear_model_from_covariance(
            LinearVariant::Full, beta, cov, 1e-6, st.mean1, st.mean2, n1, 160 - n1);
        std::vector<int> labels(static_cast<std::size_t>(grid.rows()));
        for (std::int64_t i = 0; i < grid.rows(); ++i)
            labels[static_cast<std::size_t>(i)] = classify_linear(model, grid.row_span(i));
        if (!prev.empty())
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (prev[i] == 1) CHECK(labels[i] == 1);
        prev = labels;
    }
}

TEST_CASE("balanced data: Compressed and Projected agree on every test point") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const LabeledDataset train = gaussian_data(4, 200, 2.0, 0.5, 100 + seed);
        REQUIRE(train.n1 == train.n2);
        FitConfig cfg;
        cfg.m = 40;
        cfg.s = 0.2;
        cfg.gamma = 1e-6;
        cfg.seed = 7000 + seed; // same seed -> same Q -> shared beta_c
        const LinearModel comp = fit_linear(train, LinearVariant::Compressed, cfg);
        const LinearModel proj = fit_linear(train, LinearVariant::Projected, cfg);
        const Matrix grid = random_grid(4, 300, 200 + seed);
        for (std::int64_t i = 0; i < grid.rows(); ++i)
            CHECK(classify_linear(comp, grid.row_span(i)) ==
                  classify_linear(proj, grid.row_span(i)));
    }
}

TEST_CASE("FRF recovers a usable direction from the joint sketch") {
    PopulationModel pop = make_gauss_population(6, 6.0);
    const double bayes = stdnormal_cdf(-std::sqrt(6.0));
    const LabeledDataset train = synthesize_gaussian(pop, 2000, 171);
    const LabeledDataset test = synthesize_gaussian(pop, 4000, 172);
    FitConfig cfg;
    cfg.m = 200;
    cfg.s = 0.1;
    cfg.gamma = 1e-6;
    double worst = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        cfg.seed = seed;
        const LinearModel model = fit_linear(train, LinearVariant::FRF, cfg);
        CHECK(model.sigma2 > 0.0);
        CHECK(model.proj_mean1 > model.proj_mean2); // oriented toward class 1
        worst = std::max(worst, misclassification_rate(model, test));
    }
    // close to the optimal rate despite the joint sketch
    CHECK(worst < bayes + 0.05);
}

TEST_CASE("subsampled fit uses exactly the stratified budget") {
    const LabeledDataset train = gaussian_data(3, 100, 2.0, 0.6, 111);
    FitConfig cfg;
    cfg.m = 20;
    cfg.gamma = 1e-6;
    cfg.seed = 5;
    const LinearModel model = fit_linear(train, LinearVariant::Subsampled, cfg);
    const auto [m1, m2] = split_compression_sizes(train.n1, train.n2, 20);
    CHECK(model.prior1 == doctest::Approx(static_cast<double>(m1) / (m1 + m2)));
    CHECK(model.m == 20);
}

TEST_CASE("singular compressed covariance without ridge raises NotPositiveDefinite") {
    // p exceeds the compressed sample count, so the estimate is rank
    // deficient and gamma = 0 must fail loudly
    const LabeledDataset train = gaussian_data(12, 80, 2.0, 0.5, 119);
    FitConfig cfg;
    cfg.m = 6;
    cfg.s = 0.3;
    cfg.gamma = 0.0;
    cfg.seed = 4;
    CHECK_THROWS_AS(fit_linear(train, LinearVariant::Compressed, cfg), NotPositiveDefinite);
    cfg.gamma = 1e-6;
    CHECK_NOTHROW(fit_linear(train, LinearVariant::Compressed, cfg));
}

TEST_CASE("fit rejects budgets larger than the data") {
    const LabeledDataset train = gaussian_data(3, 50, 2.0, 0.5, 121);
    FitConfig cfg;
    cfg.m = 51;
    CHECK_THROWS_AS(fit_linear(train, LinearVariant::Compressed, cfg), InvalidArgument);
}

TEST_CASE("quadratic rule: identical class laws fall back to priors") {
    PopulationModel pop;
    pop.sigma1 = SymMatrix::identity(3);
    pop.mu1.assign(3, 0.0);
    pop.mu2.assign(3, 0.0);
    pop.prior1 = 0.3;
    pop.prior2 = 0.7;
    const LabeledDataset train = synthesize_gaussian(pop, 4000, 131);
    const LabeledDataset test = synthesize_gaussian(pop, 20000, 132);
    const QuadraticModel model = fit_quadratic(train, QuadraticVariant::Full, {.gamma = 1e-8});
    const double err = misclassification_rate(model, test);
    CHECK(err == doctest::Approx(0.3).epsilon(0.08)); // max-prior complement
}

TEST_CASE("QDA reduces to LDA when covariances and priors match") {
    const LabeledDataset d = gaussian_data(3, 300, 2.0, 0.5, 141);
    const ClassStatistics st = class_statistics(d);
    const SymMatrix cov = within_class_covariance(d, st);
    const double gamma = 1e-6;

    const QuadraticModel qda = quadratic_model_from_covariances(
        QuadraticVariant::Full, cov, cov, gamma, st.mean1, st.mean2, 100, 100);
    const std::vector<double> beta = ridge_solve(cov, gamma, st.mean_difference);
    const LinearModel lda = linear_model_from_covariance(LinearVariant::Full, beta, cov, gamma,
                                                         st.mean1, st.mean2, 100, 100);
    const Matrix grid = random_grid(3, 500, 142);
    for (std::int64_t i = 0; i < grid.rows(); ++i)
        CHECK(classify_quadratic(qda, grid.row_span(i)) ==
              classify_linear(lda, grid.row_span(i)));
}

TEST_CASE("classify_quadratic scalar cases") {
    SUBCASE("log-determinant penalty decides at the shared mean") {
        SymMatrix s1(1), s2(1);
        s1.set(0, 0, 1.0);
        s2.set(0, 0, 4.0);
        const QuadraticModel model = quadratic_model_from_covariances(
            QuadraticVariant::Full, s1, s2, 0.0, {0.0}, {0.0}, 50, 50);
        CHECK(classify_quadratic(model, std::vector<double>{0.0}) == 1);
    }
    SUBCASE("x at the second class mean with smaller log-det goes to class 2") {
        SymMatrix s1(2), s2(2);
        for (int i = 0; i < 2; ++i) {
            s1.set(i, i, 2.0);
            s2.set(i, i, 1.0);
        }
        const QuadraticModel model = quadratic_model_from_covariances(
            QuadraticVariant::Full, s1, s2, 0.0, {3.0, 0.0}, {0.0, 0.0}, 50, 50);
        CHECK(classify_quadratic(model, std::vector<double>{0.0, 0.0}) == 2);
    }
}

TEST_CASE("compressed QDA fits per-class covariances and classifies sanely") {
    // well-separated classes with different scales
    PopulationModel pop;
    pop.sigma1 = SymMatrix::identity(3);
    pop.sigma2 = SymMatrix::identity(3);
    for (int i = 0; i < 3; ++i) pop.sigma2->set(i, i, 4.0);
    pop.mu1.assign(3, 2.0);
    pop.mu2.assign(3, -2.0);
    const LabeledDataset train = synthesize_gaussian(pop, 2000, 151);
    const LabeledDataset test = synthesize_gaussian(pop, 4000, 152);
    FitConfig cfg;
    cfg.m = 400;
    cfg.s = 0.05;
    cfg.gamma = 1e-4;
    cfg.seed = 9;
    const QuadraticModel comp = fit_quadratic(train, QuadraticVariant::Compressed, cfg);
    const QuadraticModel full = fit_quadratic(train, QuadraticVariant::Full, cfg);
    const double err_comp = misclassification_rate(comp, test);
    const double err_full = misclassification_rate(full, test);
    CHECK(err_comp < 0.05);
    CHECK(err_full < 0.05);
}

TEST_CASE("misclassification_rate of a constant classifier") {
    // 21% class 1 labels; a prior-only model with prior2 > prior1 says 2 always
    std::mt19937_64 rng(161);
    const std::int64_t n = 1000;
    Matrix feats(n, 1);
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::normal_distribution<double> gauss;
    for (std::int64_t i = 0; i < n; ++i) {
        feats(i, 0) = gauss(rng);
        labels[static_cast<std::size_t>(i)] = i < 210 ? 1 : 2;
    }
    const LabeledDataset test = make_labeled_dataset(std::move(feats), labels, "test");
    SymMatrix cov(1);
    cov.set(0, 0, 1.0);
    const LinearModel all2 = linear_model_from_covariance(
        LinearVariant::Full, std::vector<double>{0.0}, cov, 0.0, {0.0}, {0.0}, 21, 79);
    CHECK(misclassification_rate(all2, test) == doctest::Approx(0.21).epsilon(1e-12));
    const LinearModel all1 = linear_model_from_covariance(
        LinearVariant::Full, std::vector<double>{0.0}, cov, 0.0, {0.0}, {0.0}, 79, 21);
    CHECK(misclassification_rate(all1, test) == doctest::Approx(0.79).epsilon(1e-12));
}

TEST_SUITE_END();
