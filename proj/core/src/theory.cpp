#include "cda/theory.hpp"

#include <cmath>

namespace cda {

void PopulationModel::validate() const {
    if (mu1.empty() || mu1.size() != mu2.size())
        throw DimensionMismatch("PopulationModel: mean dimensions");
    if (sigma1.dim() != dim()) throw DimensionMismatch("PopulationModel: sigma1 dim");
    if (sigma2 && sigma2->dim() != dim()) throw DimensionMismatch("PopulationModel: sigma2 dim");
    if (!(prior1 > 0.0 && prior2 > 0.0) || std::abs(prior1 + prior2 - 1.0) > 1e-12)
        throw InvalidArgument("PopulationModel: priors must be positive and sum to 1");
    CholeskyFactor check1(sigma1, 0.0); // throws NotPositiveDefinite
    if (sigma2) CholeskyFactor check2(*sigma2, 0.0);
}

double population_separation(const PopulationModel& pop) {
    const SymMatrix& sigma = pop.shared_sigma();
    const std::vector<double> delta = pop.delta();
    const std::vector<double> x = ridge_solve(sigma, 0.0, delta);
    return dot(delta, x);
}

double bayes_error(const PopulationModel& pop) {
    if (std::abs(pop.prior1 - pop.prior2) > 1e-12)
        throw UnequalPriors("bayes_error requires pi_1 = pi_2");
    const double d2 = population_separation(pop);
    return stdnormal_cdf(-std::sqrt(d2));
}

double compressed_rule_error(const PopulationModel& pop, std::span<const double> d,
                             const SymMatrix& s_c, std::span<const double> xbar1,
                             std::span<const double> xbar2) {
    const int p = pop.dim();
    if (static_cast<int>(d.size()) != p || s_c.dim() != p ||
        static_cast<int>(xbar1.size()) != p || static_cast<int>(xbar2.size()) != p)
        throw DimensionMismatch("compressed_rule_error: dimension mismatch");

    bool zero = true;
    for (double v : d)
        if (v != 0.0) {
            zero = false;
            break;
        }
    if (zero) throw ZeroDirection("compressed_rule_error: d = 0");

    const SymMatrix& sigma = pop.shared_sigma();
    const std::vector<double> u = ridge_solve(s_c, 0.0, d); // S_c^{-1} d
    const double denom = std::sqrt(quad_form(sigma, u));

    double total = 0.0;
    for (int g = 1; g <= 2; ++g) {
        const std::vector<double>& mu = (g == 1 ? pop.mu1 : pop.mu2);
        const std::span<const double> xbar = (g == 1 ? xbar1 : xbar2);
        const double sign = (g == 1 ? -1.0 : 1.0); // (-1)^g
        double numer = 0.0;
        for (int i = 0; i < p; ++i) numer += u[i] * (sign * (mu[i] - xbar[i]) - d[i]);
        total += stdnormal_cdf(numer / denom);
    }
    return 0.5 * total;
}

double subgaussian_norm_Ks(double s) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidSparsity("subgaussian_norm_Ks: s must be in (0,1)");
    return 1.0 / std::sqrt(s * std::log1p(1.0 / s));
}

double deviation_bound(const PopulationModel& pop, double s, std::int64_t m, int p, double eta,
                      double c_const) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidEta("deviation_bound: eta must be in (0,1)");
    if (m < 1) throw InvalidArgument("deviation_bound: m must be >= 1");
    if (c_const <= 0.0) throw InvalidArgument("deviation_bound: C must be positive");
    const double ks = subgaussian_norm_Ks(s);
    const double root_d2 = std::sqrt(population_separation(pop));
    const double big_p = stdnormal_pdf(root_d2) * (root_d2 + 1.0);
    return c_const * big_p * ks * ks *
           std::sqrt((std::log(1.0 / eta) + static_cast<double>(p)) / static_cast<double>(m));
}

} // namespace cda
