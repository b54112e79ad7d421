#include "cda/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cda {

void SymMatrix::rank_update(const Matrix& a, double w) {
    if (a.cols() != dim_) throw DimensionMismatch("rank_update: column count != dim");
    const int p = dim_;
    const std::int64_t n = a.rows();
    constexpr std::int64_t kBlock = 64;
    for (std::int64_t k0 = 0; k0 < n; k0 += kBlock) {
        const std::int64_t k1 = std::min(k0 + kBlock, n);
        for (int i = 0; i < p; ++i) {
            double* si = a_.data() + static_cast<std::size_t>(i) * p;
            for (std::int64_t k = k0; k < k1; ++k) {
                const double* rowk = a.row(k);
                const double aik = w * rowk[i];
                if (aik == 0.0) continue;
                for (int j = i; j < p; ++j) si[j] += aik * rowk[j];
            }
        }
    }
    // mirror upper triangle into the lower one
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            a_[static_cast<std::size_t>(j) * p + i] = a_[static_cast<std::size_t>(i) * p + j];
}

void SymMatrix::rank1_update(std::span<const double> v, double w) {
    if (static_cast<int>(v.size()) != dim_) throw DimensionMismatch("rank1_update: size != dim");
    const int p = dim_;
    for (int i = 0; i < p; ++i) {
        const double vi = w * v[i];
        double* si = a_.data() + static_cast<std::size_t>(i) * p;
        for (int j = i; j < p; ++j) si[j] += vi * v[j];
    }
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            a_[static_cast<std::size_t>(j) * p + i] = a_[static_cast<std::size_t>(i) * p + j];
}

void SymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
        throw DimensionMismatch("SymMatrix::multiply: size mismatch");
    for (int i = 0; i < dim_; ++i) {
        const double* row = a_.data() + static_cast<std::size_t>(i) * dim_;
        double acc = 0.0;
        for (int j = 0; j < dim_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

CholeskyFactor::CholeskyFactor(const SymMatrix& s, double gamma)
    : dim_(s.dim()), l_(static_cast<std::size_t>(s.dim()) * s.dim(), 0.0) {
    if (gamma < 0.0) throw InvalidArgument("CholeskyFactor: gamma must be >= 0");
    const int p = dim_;
    for (int i = 0; i < p; ++i) {
        double* li = l_.data() + static_cast<std::size_t>(i) * p;
        for (int j = 0; j <= i; ++j) {
            const double* lj = l_.data() + static_cast<std::size_t>(j) * p;
            double sum = s(i, j) + (i == j ? gamma : 0.0);
            for (int k = 0; k < j; ++k) sum -= li[k] * lj[k];
            if (i == j) {
                if (sum <= 0.0)
                    throw NotPositiveDefinite("Cholesky pivot <= 0 at index " +
                                              std::to_string(i) + " (value " +
                                              std::to_string(sum) + "); increase gamma");
                li[j] = std::sqrt(sum);
            } else {
                li[j] = sum / lj[j];
            }
        }
    }
}

void CholeskyFactor::forward_solve(std::span<const double> b, std::span<double> y) const {
    if (static_cast<int>(b.size()) != dim_) throw DimensionMismatch("forward_solve: size mismatch");
    const int p = dim_;
    for (int i = 0; i < p; ++i) {
        const double* li = l_.data() + static_cast<std::size_t>(i) * p;
        double sum = b[i];
        for (int k = 0; k < i; ++k) sum -= li[k] * y[k];
        y[i] = sum / li[i];
    }
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const {
    std::vector<double> x(dim_);
    forward_solve(b, x);
    const int p = dim_;
    for (int i = p - 1; i >= 0; --i) {
        double sum = x[i];
        for (int k = i + 1; k < p; ++k) sum -= l_[static_cast<std::size_t>(k) * p + i] * x[k];
        x[i] = sum / l_[static_cast<std::size_t>(i) * p + i];
    }
    return x;
}

double CholeskyFactor::logdet() const {
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) acc += 2.0 * std::log(l_[static_cast<std::size_t>(i) * dim_ + i]);
    return acc;
}

std::vector<double> ridge_solve(const SymMatrix& s, double gamma, std::span<const double> b) {
    if (static_cast<int>(b.size()) != s.dim()) throw DimensionMismatch("ridge_solve: size mismatch");
    return CholeskyFactor(s, gamma).solve(b);
}

double logdet_pd(const SymMatrix& s, double gamma) { return CholeskyFactor(s, gamma).logdet(); }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double quad_form(const SymMatrix& s, std::span<const double> v) {
    std::vector<double> y(v.size());
    s.multiply(v, y);
    return dot(v, y);
}

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. a is destroyed,
// v receives the eigenvectors as columns. Adequate for p up to ~1000.
void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, std::vector<double>& eig, int p) {
    v.assign(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i) * p + i] = 1.0;
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * p + j]; };
    auto vt = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(i) * p + j]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) off += at(i, j) * at(i, j);
        if (off <= 1e-28 * (p > 0 ? 1.0 : 1.0)) break;
        double scale = 0.0;
        for (int i = 0; i < p; ++i) scale = std::max(scale, std::abs(at(i, i)));
        if (off <= (scale * scale + 1e-300) * 1e-30) break;

        for (int ip = 0; ip < p - 1; ++ip) {
            for (int iq = ip + 1; iq < p; ++iq) {
                const double apq = at(ip, iq);
                if (apq == 0.0) continue;
                const double app = at(ip, ip);
                const double aqq = at(iq, iq);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                             : 1.0 / (tau - std::sqrt(1.0 + tau * tau)));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (int k = 0; k < p; ++k) {
                    const double akp = at(k, ip);
                    const double akq = at(k, iq);
                    at(k, ip) = c * akp - sn * akq;
                    at(k, iq) = sn * akp + c * akq;
                }
                for (int k = 0; k < p; ++k) {
                    const double apk = at(ip, k);
                    const double aqk = at(iq, k);
                    at(ip, k) = c * apk - sn * aqk;
                    at(iq, k) = sn * apk + c * aqk;
                }
                for (int k = 0; k < p; ++k) {
                    const double vkp = vt(k, ip);
                    const double vkq = vt(k, iq);
                    vt(k, ip) = c * vkp - sn * vkq;
                    vt(k, iq) = sn * vkp + c * vkq;
                }
            }
        }
    }
    eig.resize(p);
    for (int i = 0; i < p; ++i) eig[i] = at(i, i);
}

} // namespace

Matrix pca_top2(const Matrix& x) {
    const std::int64_t k = x.rows();
    const int p = static_cast<int>(x.cols());
    if (k < 2 || p < 2) throw InvalidArgument("pca_top2: need k >= 2 and p >= 2");

    // column means
    std::vector<double> mean(p, 0.0);
    for (std::int64_t i = 0; i < k; ++i) {
        const double* row = x.row(i);
        for (int j = 0; j < p; ++j) mean[j] += row[j];
    }
    for (int j = 0; j < p; ++j) mean[j] /= static_cast<double>(k);

    // covariance via streaming sums and the centering identity
    SymMatrix cov(p);
    cov.rank_update(x, 1.0 / static_cast<double>(k));
    cov.rank1_update(mean, -1.0);

    bool all_zero = true;
    double max_abs = 0.0;
    for (int i = 0; i < p && all_zero; ++i)
        for (int j = 0; j < p; ++j) {
            const double cij = cov(i, j);
            if (!std::isfinite(cij)) throw DegenerateSpectrum("pca_top2: non-finite covariance");
            max_abs = std::max(max_abs, std::abs(cij));
            if (cij != 0.0) {
                all_zero = false;
                break;
            }
        }
    Matrix out(k, 2);
    if (all_zero || max_abs == 0.0) return out; // identical rows: zero projections

    std::vector<double> work(cov.data(), cov.data() + static_cast<std::size_t>(p) * p);
    std::vector<double> vecs, eig;
    jacobi_eigen(work, vecs, eig, p);
    for (double e : eig)
        if (!std::isfinite(e)) throw DegenerateSpectrum("pca_top2: non-finite eigenvalue");

    // indices of the two largest eigenvalues, descending
    int i1 = 0;
    for (int i = 1; i < p; ++i)
        if (eig[i] > eig[i1]) i1 = i;
    int i2 = (i1 == 0 ? 1 : 0);
    for (int i = 0; i < p; ++i)
        if (i != i1 && eig[i] > eig[i2]) i2 = i;

    std::vector<double> v1(p), v2(p);
    for (int i = 0; i < p; ++i) {
        v1[i] = vecs[static_cast<std::size_t>(i) * p + i1];
        v2[i] = vecs[static_cast<std::size_t>(i) * p + i2];
    }
    // sign convention: first nonzero loading positive
    auto fix_sign = [p](std::vector<double>& v) {
        for (int i = 0; i < p; ++i) {
            if (std::abs(v[i]) > 1e-12) {
                if (v[i] < 0.0)
                    for (int j = 0; j < p; ++j) v[j] = -v[j];
                return;
            }
        }
    };
    fix_sign(v1);
    fix_sign(v2);

    for (std::int64_t i = 0; i < k; ++i) {
        const double* row = x.row(i);
        double a = 0.0, b = 0.0;
        for (int j = 0; j < p; ++j) {
            const double c = row[j] - mean[j];
            a += c * v1[j];
            b += c * v2[j];
        }
        out(i, 0) = a;
        out(i, 1) = b;
    }
    return out;
}

} // namespace cda
