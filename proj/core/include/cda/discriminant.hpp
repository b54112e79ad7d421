#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cda/compression.hpp"
#include "cda/datasets.hpp"
#include "cda/linalg.hpp"

namespace cda {

enum class LinearVariant { Full, Compressed, Projected, Subsampled, FRF };
enum class QuadraticVariant { Full, Compressed, Subsampled };

std::string linear_variant_name(LinearVariant v);
std::string quadratic_variant_name(QuadraticVariant v);

/// Class means, overall mean, counts and the scaled mean-difference
/// d = sqrt(n1*n2)/n * (mean1 - mean2). Single pass over the data.
struct ClassStatistics {
    std::vector<double> mean1;
    std::vector<double> mean2;
    std::vector<double> overall_mean;
    std::vector<double> mean_difference; // d
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
};

ClassStatistics class_statistics(const LabeledDataset& data);

/// Pooled within-class scatter about the class means, normalized by n
/// (not n-2).
SymMatrix within_class_covariance(const LabeledDataset& data, const ClassStatistics& stats);

/// Within-class covariance of the compressed samples, centered at the
/// FULL-data class means and normalized by m = m_1 + m_2.
SymMatrix compressed_within_class_covariance(const CompressedClassData& c1,
                                             const CompressedClassData& c2,
                                             const ClassStatistics& stats);

/// Class-g compressed covariance (1/m_g normalization), centered at the
/// class mean the compressed samples were built with.
SymMatrix per_class_compressed_covariance(const CompressedClassData& c_g);

struct FitConfig {
    std::int64_t m = 0;          // reduced sample budget (compressing variants)
    double s = 0.01;             // compression sparsity
    double gamma = 0.0;          // ridge added to every covariance estimate
    MatrixFamily family = MatrixFamily::SparseRademacher;
    std::uint64_t seed = 0;
};

/// Wall-clock breakdown of a fit, for the benchmark harness.
struct FitBreakdown {
    double compress_ms = 0.0; // sampling Q + compressing + compressed covariance
    double total_ms = 0.0;
};

/// Fitted linear rule. The decision only depends on the projection
/// z = beta' x, the projected class means, and a single variance-like
/// denominator, so those are cached at construction.
struct LinearModel {
    LinearVariant variant = LinearVariant::Full;
    std::vector<double> beta;
    std::optional<SymMatrix> covariance; // estimate the rule uses; absent for Projected/FRF
    double sigma2 = 0.0;                 // projected within-class variance (Projected/FRF)
    std::vector<double> mean1;
    std::vector<double> mean2;
    double prior1 = 0.5;
    double prior2 = 0.5;
    double gamma = 0.0;
    std::int64_t m = 0;
    double s = 0.0;
    MatrixFamily family = MatrixFamily::SparseRademacher;

    // cached pieces of the decision rule
    double proj_mean1 = 0.0; // beta' mean1 (or fitted 1-D class mean)
    double proj_mean2 = 0.0;
    double proj_denom = 0.0; // beta'(Sigma+gamma I)beta, or sigma2+gamma
};

/// Builds a model whose rule uses the given covariance estimate:
/// the denominator is beta'(cov + gamma I)beta. Used by the Full,
/// Compressed and Subsampled variants and by tests.
LinearModel linear_model_from_covariance(LinearVariant variant, std::vector<double> beta,
                                         SymMatrix cov, double gamma,
                                         std::vector<double> mean1, std::vector<double> mean2,
                                         std::int64_t n1, std::int64_t n2);

/// Builds a Projected/FRF-style model from fitted 1-D statistics: the
/// denominator is sigma2 itself (the ridge acted inside the beta solve).
LinearModel linear_model_projected(LinearVariant variant, std::vector<double> beta,
                                   double z_mean1, double z_mean2, double sigma2, double gamma,
                                   std::vector<double> mean1, std::vector<double> mean2,
                                   std::int64_t n1, std::int64_t n2);

LinearModel fit_linear(const LabeledDataset& data, LinearVariant variant, const FitConfig& cfg,
                       FitBreakdown* breakdown = nullptr);

/// argmin_g (z - z_g)^2 / denom - 2 log(prior_g); ties go to class 1.
/// A zero denominator (beta = 0) reduces the rule to priors alone.
int classify_linear(const LinearModel& model, std::span<const double> x);

/// Fitted quadratic rule: per-class covariance estimates, their
/// Cholesky factors of (S_g + gamma I) and log-determinants.
struct QuadraticModel {
    QuadraticVariant variant = QuadraticVariant::Full;
    SymMatrix s1;
    SymMatrix s2;
    CholeskyFactor chol1; // factor of s1 + gamma I, reused for solve and log-det
    CholeskyFactor chol2;
    double logdet1 = 0.0;
    double logdet2 = 0.0;
    std::vector<double> mean1;
    std::vector<double> mean2;
    double prior1 = 0.5;
    double prior2 = 0.5;
    double gamma = 0.0;
    std::int64_t m = 0;
    double s = 0.0;
    MatrixFamily family = MatrixFamily::SparseRademacher;
};

QuadraticModel quadratic_model_from_covariances(QuadraticVariant variant, SymMatrix s1,
                                                SymMatrix s2, double gamma,
                                                std::vector<double> mean1,
                                                std::vector<double> mean2, std::int64_t n1,
                                                std::int64_t n2);

QuadraticModel fit_quadratic(const LabeledDataset& data, QuadraticVariant variant,
                             const FitConfig& cfg, FitBreakdown* breakdown = nullptr);

/// argmin_g (x-mean_g)'(S_g+gamma I)^{-1}(x-mean_g) + log|S_g+gamma I|
///          - 2 log(prior_g); ties go to class 1.
int classify_quadratic(const QuadraticModel& model, std::span<const double> x);

double misclassification_rate(const LinearModel& model, const LabeledDataset& test);
double misclassification_rate(const QuadraticModel& model, const LabeledDataset& test);

} // namespace cda
