#include "cda/discriminant.hpp"

#include <chrono>
#include <cmath>

#include "cda/rng.hpp"

namespace cda {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

std::string linear_variant_name(LinearVariant v) {
    switch (v) {
        case LinearVariant::Full: return "full-lda";
        case LinearVariant::Compressed: return "compressed-lda";
        case LinearVariant::Projected: return "projected-lda";
        case LinearVariant::Subsampled: return "subsampled-lda";
        case LinearVariant::FRF: return "frf";
    }
    return "unknown";
}

std::string quadratic_variant_name(QuadraticVariant v) {
    switch (v) {
        case QuadraticVariant::Full: return "full-qda";
        case QuadraticVariant::Compressed: return "compressed-qda";
        case QuadraticVariant::Subsampled: return "subsampled-qda";
    }
    return "unknown";
}

ClassStatistics class_statistics(const LabeledDataset& data) {
    if (data.n1 == 0 || data.n2 == 0) throw EmptyClass("class_statistics: empty class");
    const std::int64_t p = data.p();
    ClassStatistics st;
    st.n1 = data.n1;
    st.n2 = data.n2;
    st.mean1.assign(p, 0.0);
    st.mean2.assign(p, 0.0);
    for (std::int64_t i = 0; i < data.n(); ++i) {
        const double* row = data.features.row(i);
        std::vector<double>& acc = (data.labels[static_cast<std::size_t>(i)] == 1 ? st.mean1
                                                                                  : st.mean2);
        for (std::int64_t j = 0; j < p; ++j) acc[static_cast<std::size_t>(j)] += row[j];
    }
    for (std::int64_t j = 0; j < p; ++j) {
        st.mean1[static_cast<std::size_t>(j)] /= static_cast<double>(st.n1);
        st.mean2[static_cast<std::size_t>(j)] /= static_cast<double>(st.n2);
    }
    const double n = static_cast<double>(st.n1 + st.n2);
    st.overall_mean.resize(p);
    st.mean_difference.resize(p);
    const double d_scale = std::sqrt(static_cast<double>(st.n1) * static_cast<double>(st.n2)) / n;
    for (std::int64_t j = 0; j < p; ++j) {
        const double m1 = st.mean1[static_cast<std::size_t>(j)];
        const double m2 = st.mean2[static_cast<std::size_t>(j)];
        st.overall_mean[static_cast<std::size_t>(j)] =
            (static_cast<double>(st.n1) * m1 + static_cast<double>(st.n2) * m2) / n;
        st.mean_difference[static_cast<std::size_t>(j)] = d_scale * (m1 - m2);
    }
    return st;
}

SymMatrix within_class_covariance(const LabeledDataset& data, const ClassStatistics& stats) {
    const int p = static_cast<int>(data.p());
    const double n = static_cast<double>(data.n());
    // streaming sums, centering identity at the end:
    // (1/n) sum_g sum_i x x' - sum_g (n_g/n) mean_g mean_g'
    SymMatrix s(p);
    s.rank_update(data.features, 1.0 / n);
    s.rank1_update(stats.mean1, -static_cast<double>(stats.n1) / n);
    s.rank1_update(stats.mean2, -static_cast<double>(stats.n2) / n);
    return s;
}

namespace {

// Adds the centered scatter of one compressed class to s with weight w.
void add_centered_scatter(SymMatrix& s, const CompressedClassData& c, double w) {
    const std::int64_t m_g = c.samples.rows();
    const std::int64_t p = c.samples.cols();
    Matrix centered(m_g, p);
    for (std::int64_t j = 0; j < m_g; ++j) {
        const double* src = c.samples.row(j);
        double* dst = centered.row(j);
        for (std::int64_t f = 0; f < p; ++f) dst[f] = src[f] - c.source_mean[static_cast<std::size_t>(f)];
    }
    s.rank_update(centered, w);
}

} // namespace

SymMatrix compressed_within_class_covariance(const CompressedClassData& c1,
                                             const CompressedClassData& c2,
                                             const ClassStatistics& stats) {
    const std::int64_t p = c1.samples.cols();
    if (c2.samples.cols() != p || static_cast<std::int64_t>(stats.mean1.size()) != p)
        throw DimensionMismatch("compressed_within_class_covariance: dimension mismatch");
    // centering must use the same full-data class means the sketches were
    // built with, never the compressed means
    if (c1.source_mean != stats.mean1 || c2.source_mean != stats.mean2)
        throw InvalidArgument(
            "compressed_within_class_covariance: compressed data was centered on "
            "different class means");
    const double m = static_cast<double>(c1.samples.rows() + c2.samples.rows());
    SymMatrix s(static_cast<int>(p));
    add_centered_scatter(s, c1, 1.0 / m);
    add_centered_scatter(s, c2, 1.0 / m);
    return s;
}

SymMatrix per_class_compressed_covariance(const CompressedClassData& c_g) {
    const std::int64_t p = c_g.samples.cols();
    SymMatrix s(static_cast<int>(p));
    add_centered_scatter(s, c_g, 1.0 / static_cast<double>(c_g.samples.rows()));
    return s;
}

LinearModel linear_model_from_covariance(LinearVariant variant, std::vector<double> beta,
                                         SymMatrix cov, double gamma,
                                         std::vector<double> mean1, std::vector<double> mean2,
                                         std::int64_t n1, std::int64_t n2) {
    LinearModel model;
    model.variant = variant;
    model.gamma = gamma;
    const double denom_core = quad_form(cov, beta);
    model.proj_denom = denom_core + gamma * dot(beta, beta);
    model.proj_mean1 = dot(beta, mean1);
    model.proj_mean2 = dot(beta, mean2);
    model.beta = std::move(beta);
    model.covariance = std::move(cov);
    model.mean1 = std::move(mean1);
    model.mean2 = std::move(mean2);
    const double n = static_cast<double>(n1 + n2);
    model.prior1 = static_cast<double>(n1) / n;
    model.prior2 = static_cast<double>(n2) / n;
    return model;
}

LinearModel linear_model_projected(LinearVariant variant, std::vector<double> beta,
                                   double z_mean1, double z_mean2, double sigma2, double gamma,
                                   std::vector<double> mean1, std::vector<double> mean2,
                                   std::int64_t n1, std::int64_t n2) {
    LinearModel model;
    model.variant = variant;
    model.gamma = gamma;
    model.sigma2 = sigma2;
    // gamma already acted inside the beta solve; the fitted 1-D variance is
    // used as-is, keeping the rule invariant to the scale of beta
    model.proj_denom = sigma2;
    model.proj_mean1 = z_mean1;
    model.proj_mean2 = z_mean2;
    model.beta = std::move(beta);
    model.mean1 = std::move(mean1);
    model.mean2 = std::move(mean2);
    const double n = static_cast<double>(n1 + n2);
    model.prior1 = static_cast<double>(n1) / n;
    model.prior2 = static_cast<double>(n2) / n;
    return model;
}

namespace {

struct CompressedFit {
    SymMatrix sigma_c;
    std::vector<double> beta;
    double compress_ms = 0.0;
};

// Shared Compressed-LDA core: split sizes, per-class sketches, Sigma_wc,
// beta_c = ridge_solve(Sigma_wc, gamma, d).
CompressedFit compressed_core(const LabeledDataset& data, const ClassStatistics& stats,
                              const FitConfig& cfg) {
    const auto [m1, m2] = split_compression_sizes(stats.n1, stats.n2, cfg.m);
    const Clock::time_point t0 = Clock::now();
    const std::vector<std::int64_t> rows1 = data.class_rows(1);
    const std::vector<std::int64_t> rows2 = data.class_rows(2);
    const SparseCompressionMatrix q1 =
        sample_compression_matrix(cfg.family, m1, stats.n1, cfg.s, derive_seed(cfg.seed, {1}));
    const SparseCompressionMatrix q2 =
        sample_compression_matrix(cfg.family, m2, stats.n2, cfg.s, derive_seed(cfg.seed, {2}));
    const CompressedClassData c1 = compress_rows(data.features, rows1, stats.mean1, q1, 1);
    const CompressedClassData c2 = compress_rows(data.features, rows2, stats.mean2, q2, 2);
    CompressedFit fit;
    fit.sigma_c = compressed_within_class_covariance(c1, c2, stats);
    fit.compress_ms = ms_since(t0);
    fit.beta = ridge_solve(fit.sigma_c, cfg.gamma, stats.mean_difference);
    return fit;
}

// Projects all training samples on beta and fits the 1-D class means and
// pooled within-class variance (1/n normalization).
LinearModel projected_from_beta(LinearVariant variant, const LabeledDataset& data,
                                const ClassStatistics& stats, std::vector<double> beta,
                                const FitConfig& cfg) {
    double z_sum1 = 0.0, z_sum2 = 0.0;
    std::vector<double> z(static_cast<std::size_t>(data.n()));
    for (std::int64_t i = 0; i < data.n(); ++i) {
        const double zi = dot(beta, data.features.row_span(i));
        z[static_cast<std::size_t>(i)] = zi;
        (data.labels[static_cast<std::size_t>(i)] == 1 ? z_sum1 : z_sum2) += zi;
    }
    const double z1 = z_sum1 / static_cast<double>(stats.n1);
    const double z2 = z_sum2 / static_cast<double>(stats.n2);
    double ss = 0.0;
    for (std::int64_t i = 0; i < data.n(); ++i) {
        const double c = z[static_cast<std::size_t>(i)] -
                         (data.labels[static_cast<std::size_t>(i)] == 1 ? z1 : z2);
        ss += c * c;
    }
    const double sigma2 = ss / static_cast<double>(data.n());
    LinearModel model = linear_model_projected(variant, std::move(beta), z1, z2, sigma2,
                                               cfg.gamma, stats.mean1, stats.mean2, stats.n1,
                                               stats.n2);
    model.m = cfg.m;
    model.s = cfg.s;
    model.family = cfg.family;
    return model;
}

LabeledDataset stratified_subsample(const LabeledDataset& data, const ClassStatistics& stats,
                                    const FitConfig& cfg) {
    const auto [m1, m2] = split_compression_sizes(stats.n1, stats.n2, cfg.m);
    std::vector<std::int64_t> kept;
    for (int g = 1; g <= 2; ++g) {
        const std::vector<std::int64_t> rows = data.class_rows(g);
        Rng rng = make_rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(g)}));
        for (std::int64_t idx : sample_without_replacement(
                 static_cast<std::int64_t>(rows.size()), g == 1 ? m1 : m2, rng))
            kept.push_back(rows[static_cast<std::size_t>(idx)]);
    }
    std::sort(kept.begin(), kept.end());
    return subset_rows(data, kept, data.provenance + " [subsample]");
}

void check_budget(const LabeledDataset& data, const FitConfig& cfg) {
    if (cfg.m > data.n())
        throw InvalidArgument("fit: m exceeds the training sample count");
    if (cfg.m < 2) throw InvalidArgument("fit: m must be >= 2");
}

} // namespace

LinearModel fit_linear(const LabeledDataset& data, LinearVariant variant, const FitConfig& cfg,
                       FitBreakdown* breakdown) {
    const Clock::time_point t0 = Clock::now();
    double compress_ms = 0.0;
    ClassStatistics stats = class_statistics(data);
    LinearModel model;

    switch (variant) {
        case LinearVariant::Full: {
            SymMatrix sigma = within_class_covariance(data, stats);
            std::vector<double> beta = ridge_solve(sigma, cfg.gamma, stats.mean_difference);
            model = linear_model_from_covariance(variant, std::move(beta), std::move(sigma),
                                                 cfg.gamma, stats.mean1, stats.mean2, stats.n1,
                                                 stats.n2);
            model.m = data.n();
            break;
        }
        case LinearVariant::Compressed: {
            check_budget(data, cfg);
            CompressedFit fit = compressed_core(data, stats, cfg);
            compress_ms = fit.compress_ms;
            model = linear_model_from_covariance(variant, std::move(fit.beta),
                                                 std::move(fit.sigma_c), cfg.gamma, stats.mean1,
                                                 stats.mean2, stats.n1, stats.n2);
            model.m = cfg.m;
            break;
        }
        case LinearVariant::Projected: {
            check_budget(data, cfg);
            CompressedFit fit = compressed_core(data, stats, cfg);
            compress_ms = fit.compress_ms;
            model = projected_from_beta(variant, data, stats, std::move(fit.beta), cfg);
            break;
        }
        case LinearVariant::Subsampled: {
            check_budget(data, cfg);
            const LabeledDataset sub = stratified_subsample(data, stats, cfg);
            ClassStatistics sub_stats = class_statistics(sub);
            SymMatrix sigma = within_class_covariance(sub, sub_stats);
            std::vector<double> beta = ridge_solve(sigma, cfg.gamma, sub_stats.mean_difference);
            model = linear_model_from_covariance(variant, std::move(beta), std::move(sigma),
                                                 cfg.gamma, sub_stats.mean1, sub_stats.mean2,
                                                 sub_stats.n1, sub_stats.n2);
            model.m = cfg.m;
            break;
        }
        case LinearVariant::FRF: {
            check_budget(data, cfg);
            // joint sketch of the centered data; the discriminant vector is
            // the sketched least-squares solution with an optimal-scoring
            // target, so both the Gram matrix and the cross term come from
            // the same sketch. 1-D LDA on full-data projections afterwards.
            const Clock::time_point tc = Clock::now();
            std::vector<std::int64_t> all_rows(static_cast<std::size_t>(data.n()));
            for (std::int64_t i = 0; i < data.n(); ++i) all_rows[static_cast<std::size_t>(i)] = i;
            const SparseCompressionMatrix q = sample_compression_matrix(
                cfg.family, cfg.m, data.n(), cfg.s, derive_seed(cfg.seed, {0}));
            const CompressedClassData joint =
                compress_rows(data.features, all_rows, stats.overall_mean, q, 1);
            SymMatrix s_joint = per_class_compressed_covariance(joint);

            // sketched target: w = scale * Q ytilde with ytilde_i = +-1/n_g
            std::vector<double> w(static_cast<std::size_t>(cfg.m), 0.0);
            for (const Triplet& t : q.triplets()) {
                const double y = data.labels[static_cast<std::size_t>(t.col)] == 1
                                     ? 1.0 / static_cast<double>(stats.n1)
                                     : -1.0 / static_cast<double>(stats.n2);
                w[static_cast<std::size_t>(t.row)] += t.value * y;
            }
            const double scale = q.compress_scale();
            const std::int64_t p = data.p();
            std::vector<double> cross(static_cast<std::size_t>(p), 0.0);
            for (std::int64_t j = 0; j < cfg.m; ++j) {
                const double wj = scale * w[static_cast<std::size_t>(j)];
                if (wj == 0.0) continue;
                const double* zj = joint.samples.row(j);
                for (std::int64_t f = 0; f < p; ++f)
                    cross[static_cast<std::size_t>(f)] +=
                        wj * (zj[f] - stats.overall_mean[static_cast<std::size_t>(f)]);
            }
            for (double& v : cross) v /= static_cast<double>(cfg.m);
            compress_ms = ms_since(tc);

            std::vector<double> beta = ridge_solve(s_joint, cfg.gamma, cross);
            model = projected_from_beta(variant, data, stats, std::move(beta), cfg);
            break;
        }
    }
    model.s = cfg.s;
    model.family = cfg.family;
    if (variant == LinearVariant::Full) model.s = 0.0;
    if (breakdown) {
        breakdown->compress_ms = compress_ms;
        breakdown->total_ms = ms_since(t0);
    }
    return model;
}

int classify_linear(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.beta.size()) throw DimensionMismatch("classify_linear: x dimension");
    const double z = dot(model.beta, x);
    double score1 = -2.0 * std::log(model.prior1);
    double score2 = -2.0 * std::log(model.prior2);
    if (model.proj_denom > 0.0) {
        const double d1 = z - model.proj_mean1;
        const double d2 = z - model.proj_mean2;
        score1 += d1 * d1 / model.proj_denom;
        score2 += d2 * d2 / model.proj_denom;
    }
    return score1 <= score2 ? 1 : 2;
}

namespace {

SymMatrix class_scatter(const Matrix& x, std::span<const double> mean) {
    const int p = static_cast<int>(x.cols());
    SymMatrix s(p);
    s.rank_update(x, 1.0 / static_cast<double>(x.rows()));
    s.rank1_update(mean, -1.0);
    return s;
}

} // namespace

QuadraticModel quadratic_model_from_covariances(QuadraticVariant variant, SymMatrix s1,
                                                SymMatrix s2, double gamma,
                                                std::vector<double> mean1,
                                                std::vector<double> mean2, std::int64_t n1,
                                                std::int64_t n2) {
    QuadraticModel model;
    model.variant = variant;
    model.gamma = gamma;
    model.chol1 = CholeskyFactor(s1, gamma);
    model.chol2 = CholeskyFactor(s2, gamma);
    model.logdet1 = model.chol1.logdet();
    model.logdet2 = model.chol2.logdet();
    model.s1 = std::move(s1);
    model.s2 = std::move(s2);
    model.mean1 = std::move(mean1);
    model.mean2 = std::move(mean2);
    const double n = static_cast<double>(n1 + n2);
    model.prior1 = static_cast<double>(n1) / n;
    model.prior2 = static_cast<double>(n2) / n;
    return model;
}

QuadraticModel fit_quadratic(const LabeledDataset& data, QuadraticVariant variant,
                             const FitConfig& cfg, FitBreakdown* breakdown) {
    const Clock::time_point t0 = Clock::now();
    double compress_ms = 0.0;
    ClassStatistics stats = class_statistics(data);
    QuadraticModel model;

    switch (variant) {
        case QuadraticVariant::Full: {
            model = quadratic_model_from_covariances(
                variant, class_scatter(data.class_submatrix(1), stats.mean1),
                class_scatter(data.class_submatrix(2), stats.mean2), cfg.gamma, stats.mean1,
                stats.mean2, stats.n1, stats.n2);
            model.m = data.n();
            break;
        }
        case QuadraticVariant::Compressed: {
            check_budget(data, cfg);
            const auto [m1, m2] = split_compression_sizes(stats.n1, stats.n2, cfg.m);
            const Clock::time_point tc = Clock::now();
            const SparseCompressionMatrix q1 = sample_compression_matrix(
                cfg.family, m1, stats.n1, cfg.s, derive_seed(cfg.seed, {1}));
            const SparseCompressionMatrix q2 = sample_compression_matrix(
                cfg.family, m2, stats.n2, cfg.s, derive_seed(cfg.seed, {2}));
            const CompressedClassData c1 =
                compress_rows(data.features, data.class_rows(1), stats.mean1, q1, 1);
            const CompressedClassData c2 =
                compress_rows(data.features, data.class_rows(2), stats.mean2, q2, 2);
            SymMatrix s1 = per_class_compressed_covariance(c1);
            SymMatrix s2 = per_class_compressed_covariance(c2);
            compress_ms = ms_since(tc);
            model = quadratic_model_from_covariances(variant, std::move(s1), std::move(s2),
                                                     cfg.gamma, stats.mean1, stats.mean2,
                                                     stats.n1, stats.n2);
            model.m = cfg.m;
            break;
        }
        case QuadraticVariant::Subsampled: {
            check_budget(data, cfg);
            const LabeledDataset sub = stratified_subsample(data, stats, cfg);
            ClassStatistics sub_stats = class_statistics(sub);
            model = quadratic_model_from_covariances(
                variant, class_scatter(sub.class_submatrix(1), sub_stats.mean1),
                class_scatter(sub.class_submatrix(2), sub_stats.mean2), cfg.gamma,
                sub_stats.mean1, sub_stats.mean2, sub_stats.n1, sub_stats.n2);
            model.m = cfg.m;
            break;
        }
    }
    model.s = (variant == QuadraticVariant::Full ? 0.0 : cfg.s);
    model.family = cfg.family;
    if (breakdown) {
        breakdown->compress_ms = compress_ms;
        breakdown->total_ms = ms_since(t0);
    }
    return model;
}

int classify_quadratic(const QuadraticModel& model, std::span<const double> x) {
    const std::size_t p = model.mean1.size();
    if (x.size() != p) throw DimensionMismatch("classify_quadratic: x dimension");
    std::vector<double> diff(p), y(p);
    double score[2];
    for (int g = 1; g <= 2; ++g) {
        const std::vector<double>& mean = (g == 1 ? model.mean1 : model.mean2);
        const CholeskyFactor& chol = (g == 1 ? model.chol1 : model.chol2);
        for (std::size_t i = 0; i < p; ++i) diff[i] = x[i] - mean[i];
        chol.forward_solve(diff, y);
        const double quad = dot(y, y);
        const double logdet = (g == 1 ? model.logdet1 : model.logdet2);
        const double prior = (g == 1 ? model.prior1 : model.prior2);
        score[g - 1] = quad + logdet - 2.0 * std::log(prior);
    }
    return score[0] <= score[1] ? 1 : 2;
}

namespace {

template <typename Model, typename Fn>
double error_rate(const Model& model, const LabeledDataset& test, Fn&& classify) {
    if (test.n() == 0) throw EmptyClass("misclassification_rate: empty test set");
    std::int64_t wrong = 0;
    for (std::int64_t i = 0; i < test.n(); ++i)
        if (classify(model, test.features.row_span(i)) != test.labels[static_cast<std::size_t>(i)])
            ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.n());
}

} // namespace

double misclassification_rate(const LinearModel& model, const LabeledDataset& test) {
    return error_rate(model, test,
                      [](const LinearModel& m, std::span<const double> x) {
                          return classify_linear(m, x);
                      });
}

double misclassification_rate(const QuadraticModel& model, const LabeledDataset& test) {
    return error_rate(model, test,
                      [](const QuadraticModel& m, std::span<const double> x) {
                          return classify_quadratic(m, x);
                      });
}

} // namespace cda
