#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cda/linalg.hpp"

namespace cda {

enum class MatrixFamily { SparseRademacher, SparseGaussian, CountSketch };

std::string family_name(MatrixFamily f);
MatrixFamily family_from_name(const std::string& name);

struct Triplet {
    std::int64_t row;
    std::int64_t col;
    double value;
};

/// Random m_g x n_g compression matrix in triplet form. Triplets are held
/// in canonical (row, col) order, so downstream accumulation order does
/// not depend on how the triplets were supplied.
class SparseCompressionMatrix {
public:
    SparseCompressionMatrix(std::int64_t rows, std::int64_t cols, double sparsity,
                            MatrixFamily family, std::vector<Triplet> triplets,
                            std::uint64_t seed);

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    double sparsity() const { return sparsity_; }
    MatrixFamily family() const { return family_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<Triplet>& triplets() const { return triplets_; }

    /// Row-scaling constant applied by compress_class: 1/sqrt(n_g*s) for
    /// the Bernoulli(s) families; sqrt(m_g/n_g) for count sketch, whose
    /// per-entry hit probability is 1/m_g rather than s.
    double compress_scale() const;

private:
    std::int64_t rows_;
    std::int64_t cols_;
    double sparsity_;
    MatrixFamily family_;
    std::vector<Triplet> triplets_;
    std::uint64_t seed_;
};

/// One class's compressed samples together with the full-data class mean
/// they were centered on.
struct CompressedClassData {
    int label = 1;                    // 1 or 2
    Matrix samples;                   // m_g x p
    std::vector<double> source_mean;  // full-data class mean, length p
    double sparsity = 0.0;
};

/// Draws a random compression matrix:
///  - SparseRademacher: entries independently 0 w.p. 1-s, +/-1 w.p. s/2 each;
///  - SparseGaussian: entries nonzero w.p. s, standard normal given nonzero;
///  - CountSketch: one +/-1 per column in a uniform random row (s ignored).
/// Identical (family, dims, s, seed) produce identical matrices. The sparse
/// families draw the nonzero count from Binomial(m*n, s) and place positions
/// uniformly without replacement, which preserves the i.i.d. entry law at
/// O(#nonzeros) cost.
SparseCompressionMatrix sample_compression_matrix(MatrixFamily family, std::int64_t m_g,
                                                  std::int64_t n_g, double s,
                                                  std::uint64_t seed);

/// Forms the compressed samples of one class: row j of the result is
///   scale * sum_i Q(j,i) * (x_i - mean) + mean,
/// touching only Q's nonzero triplets. Per-row summation runs in ascending
/// column order regardless of how Q's triplets were supplied.
CompressedClassData compress_class(const Matrix& x_g, std::span<const double> class_mean,
                                   const SparseCompressionMatrix& q, int label = 1);

/// Same compression applied to a subset of rows of a larger matrix;
/// q.cols() must equal row_ids.size(). Avoids materializing per-class
/// submatrices of large datasets.
CompressedClassData compress_rows(const Matrix& x, std::span<const std::int64_t> row_ids,
                                  std::span<const double> class_mean,
                                  const SparseCompressionMatrix& q, int label = 1);

/// Per-class compressed sample counts: m_g = floor(n_g * m / n), each
/// clamped up to 1. The floor remainder is not redistributed, so
/// m_1 + m_2 can fall short of m by at most one per class.
std::pair<std::int64_t, std::int64_t> split_compression_sizes(std::int64_t n_1,
                                                              std::int64_t n_2,
                                                              std::int64_t m);

} // namespace cda
