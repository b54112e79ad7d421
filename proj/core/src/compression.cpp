#include "cda/compression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "cda/rng.hpp"

namespace cda {

std::string family_name(MatrixFamily f) {
    switch (f) {
        case MatrixFamily::SparseRademacher: return "rademacher";
        case MatrixFamily::SparseGaussian: return "gaussian";
        case MatrixFamily::CountSketch: return "countsketch";
    }
    return "unknown";
}

MatrixFamily family_from_name(const std::string& name) {
    if (name == "rademacher") return MatrixFamily::SparseRademacher;
    if (name == "gaussian") return MatrixFamily::SparseGaussian;
    if (name == "countsketch") return MatrixFamily::CountSketch;
    throw InvalidArgument("unknown matrix family: " + name);
}

SparseCompressionMatrix::SparseCompressionMatrix(std::int64_t rows, std::int64_t cols,
                                                 double sparsity, MatrixFamily family,
                                                 std::vector<Triplet> triplets,
                                                 std::uint64_t seed)
    : rows_(rows), cols_(cols), sparsity_(sparsity), family_(family),
      triplets_(std::move(triplets)), seed_(seed) {
    if (rows_ < 1 || cols_ < 1)
        throw InvalidArgument("SparseCompressionMatrix: dimensions must be >= 1");
    if (family_ != MatrixFamily::CountSketch && !(sparsity_ > 0.0 && sparsity_ < 1.0))
        throw InvalidSparsity("sparsity must lie in (0,1)");
    if (static_cast<std::int64_t>(triplets_.size()) > rows_ * cols_)
        throw InvalidArgument("SparseCompressionMatrix: more triplets than cells");

    std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::int64_t> col_hits(family_ == MatrixFamily::CountSketch ? cols_ : 0, 0);
    for (std::size_t k = 0; k < triplets_.size(); ++k) {
        const Triplet& t = triplets_[k];
        if (t.row < 0 || t.row >= rows_ || t.col < 0 || t.col >= cols_)
            throw InvalidArgument("SparseCompressionMatrix: triplet index out of range");
        if (k > 0 && triplets_[k - 1].row == t.row && triplets_[k - 1].col == t.col)
            throw InvalidArgument("SparseCompressionMatrix: duplicate (row,col) pair");
        if (!std::isfinite(t.value))
            throw InvalidArgument("SparseCompressionMatrix: non-finite value");
        switch (family_) {
            case MatrixFamily::SparseRademacher:
            case MatrixFamily::CountSketch:
                if (t.value != 1.0 && t.value != -1.0)
                    throw InvalidArgument("SparseCompressionMatrix: values must be +/-1");
                break;
            case MatrixFamily::SparseGaussian:
                break;
        }
        if (family_ == MatrixFamily::CountSketch) ++col_hits[t.col];
    }
    if (family_ == MatrixFamily::CountSketch) {
        for (std::int64_t c = 0; c < cols_; ++c)
            if (col_hits[c] != 1)
                throw InvalidArgument("CountSketch: each column needs exactly one entry");
    }
}

double SparseCompressionMatrix::compress_scale() const {
    if (family_ == MatrixFamily::CountSketch)
        return std::sqrt(static_cast<double>(rows_) / static_cast<double>(cols_));
    return 1.0 / std::sqrt(static_cast<double>(cols_) * sparsity_);
}

namespace {

// k distinct cell indices uniformly from [0, total), ascending. Rejection
// sampling into a bitmap; enumerating the bits yields the sorted order
// directly. Expected draws are total*ln(1/(1-k/total)), fine for any s < 1.
std::vector<std::int64_t> sample_cells(std::int64_t total, std::int64_t k, Rng& rng) {
    std::vector<std::uint64_t> bits(static_cast<std::size_t>((total + 63) / 64), 0);
    std::uniform_int_distribution<std::int64_t> pick(0, total - 1);
    std::int64_t placed = 0;
    while (placed < k) {
        const std::int64_t c = pick(rng);
        std::uint64_t& word = bits[static_cast<std::size_t>(c >> 6)];
        const std::uint64_t mask = 1ULL << (c & 63);
        if (!(word & mask)) {
            word |= mask;
            ++placed;
        }
    }
    std::vector<std::int64_t> cells;
    cells.reserve(static_cast<std::size_t>(k));
    for (std::size_t w = 0; w < bits.size(); ++w) {
        std::uint64_t word = bits[w];
        while (word != 0) {
            const int bit = std::countr_zero(word);
            cells.push_back(static_cast<std::int64_t>(w) * 64 + bit);
            word &= word - 1;
        }
    }
    return cells;
}

} // namespace

SparseCompressionMatrix sample_compression_matrix(MatrixFamily family, std::int64_t m_g,
                                                  std::int64_t n_g, double s,
                                                  std::uint64_t seed) {
    if (m_g < 1 || n_g < 1) throw InvalidArgument("sample_compression_matrix: dims must be >= 1");
    if (family != MatrixFamily::CountSketch && !(s > 0.0 && s < 1.0))
        throw InvalidSparsity("sparsity must lie in (0,1)");

    Rng rng = make_rng(seed);
    std::vector<Triplet> triplets;

    if (family == MatrixFamily::CountSketch) {
        triplets.reserve(static_cast<std::size_t>(n_g));
        std::uniform_int_distribution<std::int64_t> row_pick(0, m_g - 1);
        std::bernoulli_distribution sign(0.5);
        for (std::int64_t c = 0; c < n_g; ++c)
            triplets.push_back({row_pick(rng), c, sign(rng) ? 1.0 : -1.0});
    } else {
        const std::int64_t total = m_g * n_g;
        std::binomial_distribution<std::int64_t> count(total, s);
        const std::int64_t nnz = count(rng);
        std::vector<std::int64_t> cells = sample_cells(total, nnz, rng);
        triplets.reserve(cells.size());
        if (family == MatrixFamily::SparseRademacher) {
            std::bernoulli_distribution sign(0.5);
            for (std::int64_t cell : cells)
                triplets.push_back({cell / n_g, cell % n_g, sign(rng) ? 1.0 : -1.0});
        } else {
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (std::int64_t cell : cells)
                triplets.push_back({cell / n_g, cell % n_g, gauss(rng)});
        }
    }
    return SparseCompressionMatrix(m_g, n_g, s, family, std::move(triplets), seed);
}

namespace {

template <typename RowLookup>
CompressedClassData compress_impl(RowLookup&& source_row, std::int64_t n_rows, std::int64_t p,
                                  std::span<const double> class_mean,
                                  const SparseCompressionMatrix& q, int label) {
    if (q.cols() != n_rows) throw DimensionMismatch("compress: Q.cols() != class sample count");
    if (static_cast<std::int64_t>(class_mean.size()) != p)
        throw DimensionMismatch("compress: class mean length != feature count");

    const double scale = q.compress_scale();
    CompressedClassData out;
    out.label = label;
    out.sparsity = q.sparsity();
    out.source_mean.assign(class_mean.begin(), class_mean.end());
    out.samples = Matrix(q.rows(), p);

    // Triplets are in canonical (row, col) order: accumulate each output
    // row over ascending columns, then apply scale and add the mean back.
    std::vector<double> acc(static_cast<std::size_t>(p));
    const auto& trip = q.triplets();
    std::size_t k = 0;
    for (std::int64_t j = 0; j < q.rows(); ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        bool any = false;
        while (k < trip.size() && trip[k].row == j) {
            const double* x = source_row(trip[k].col);
            const double v = trip[k].value;
            for (std::int64_t f = 0; f < p; ++f) acc[f] += v * (x[f] - class_mean[f]);
            any = true;
            ++k;
        }
        double* dst = out.samples.row(j);
        if (any) {
            for (std::int64_t f = 0; f < p; ++f) dst[f] = scale * acc[f] + class_mean[f];
        } else {
            // empty row: the compressed sample is exactly the class mean
            std::copy(class_mean.begin(), class_mean.end(), dst);
        }
    }
    return out;
}

} // namespace

CompressedClassData compress_class(const Matrix& x_g, std::span<const double> class_mean,
                                   const SparseCompressionMatrix& q, int label) {
    return compress_impl([&](std::int64_t i) { return x_g.row(i); }, x_g.rows(),
                         x_g.cols(), class_mean, q, label);
}

CompressedClassData compress_rows(const Matrix& x, std::span<const std::int64_t> row_ids,
                                  std::span<const double> class_mean,
                                  const SparseCompressionMatrix& q, int label) {
    return compress_impl([&](std::int64_t i) { return x.row(row_ids[i]); },
                         static_cast<std::int64_t>(row_ids.size()), x.cols(), class_mean, q,
                         label);
}

std::pair<std::int64_t, std::int64_t> split_compression_sizes(std::int64_t n_1, std::int64_t n_2,
                                                              std::int64_t m) {
    if (n_1 < 1 || n_2 < 1) throw InvalidArgument("split_compression_sizes: empty class");
    if (m < 2) throw InvalidArgument("split_compression_sizes: m must be >= 2");
    const std::int64_t n = n_1 + n_2;
    std::int64_t m_1 = n_1 * m / n;
    std::int64_t m_2 = n_2 * m / n;
    m_1 = std::max<std::int64_t>(m_1, 1);
    m_2 = std::max<std::int64_t>(m_2, 1);
    return {m_1, m_2};
}

} // namespace cda
