#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "cda/linalg.hpp"

namespace cda {

/// Standard normal cdf via erfc; absolute error well below 1e-12.
inline double stdnormal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Standard normal density.
inline double stdnormal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::acos(-1.0));
}

/// True two-Gaussian population. sigma1 is the shared within-class
/// covariance unless sigma2 is set, in which case the classes have
/// their own covariances.
struct PopulationModel {
    std::vector<double> mu1;
    std::vector<double> mu2;
    SymMatrix sigma1;
    std::optional<SymMatrix> sigma2;
    double prior1 = 0.5;
    double prior2 = 0.5;

    int dim() const { return static_cast<int>(mu1.size()); }
    bool shared_covariance() const { return !sigma2.has_value(); }

    const SymMatrix& shared_sigma() const {
        if (!shared_covariance())
            throw InvalidArgument("PopulationModel: per-class covariances, no shared sigma");
        return sigma1;
    }

    const SymMatrix& class_sigma(int g) const {
        return (g == 1 || shared_covariance()) ? sigma1 : *sigma2;
    }

    /// delta = (mu1 - mu2) / 2
    std::vector<double> delta() const {
        std::vector<double> d(mu1.size());
        for (std::size_t i = 0; i < mu1.size(); ++i) d[i] = 0.5 * (mu1[i] - mu2[i]);
        return d;
    }

    /// mu = (mu1 + mu2) / 2
    std::vector<double> midpoint() const {
        std::vector<double> m(mu1.size());
        for (std::size_t i = 0; i < mu1.size(); ++i) m[i] = 0.5 * (mu1[i] + mu2[i]);
        return m;
    }

    void validate() const;
};

/// Mahalanobis separation delta^T Sigma_w^{-1} delta of a shared-covariance
/// population.
double population_separation(const PopulationModel& pop);

/// Optimal (Bayes) misclassification rate Phi(-sqrt(delta' Sigma^{-1} delta))
/// for a shared-covariance population with equal priors. Throws
/// UnequalPriors otherwise; the unequal-prior form is out of scope.
double bayes_error(const PopulationModel& pop);

/// Exact error rate of the linear rule d' S_c^{-1} (x - mean) on the true
/// population:
///   (1/2) sum_g Phi( d' S_c^{-1} {(-1)^g (mu_g - xbar_g) - d}
///                    / sqrt(d' S_c^{-1} Sigma_w S_c^{-1} d) ).
/// S_c must already include any ridge term; d must carry its
/// sqrt(n1*n2)/n scaling.
double compressed_rule_error(const PopulationModel& pop, std::span<const double> d,
                             const SymMatrix& s_c, std::span<const double> xbar1,
                             std::span<const double> xbar2);

/// Sub-Gaussian norm K_s = {s log(1 + 1/s)}^{-1/2} of a scaled sparse
/// Rademacher entry.
double subgaussian_norm_Ks(double s);

/// High-probability deviation bound C * P * K_s^2 * sqrt((log(1/eta)+p)/m)
/// with P = phi(sqrt(D2)) * (sqrt(D2)+1), D2 the population separation.
/// The absolute constant C is a caller parameter (default 1); only the
/// scaling behavior is meaningful.
double deviation_bound(const PopulationModel& pop, double s, std::int64_t m, int p, double eta,
                      double c_const = 1.0);

} // namespace cda
