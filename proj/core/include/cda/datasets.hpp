#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cda/linalg.hpp"
#include "cda/theory.hpp"

namespace cda {

/// Binary-labeled sample matrix. Labels are 1 or 2.
struct LabeledDataset {
    Matrix features;          // n x p
    std::vector<int> labels;  // length n, values in {1,2}
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    std::string provenance;

    std::int64_t n() const { return features.rows(); }
    std::int64_t p() const { return features.cols(); }

    std::vector<std::int64_t> class_rows(int g) const;
    Matrix class_submatrix(int g) const;
};

/// Recounts classes and checks the label/feature invariants.
LabeledDataset make_labeled_dataset(Matrix features, std::vector<int> labels,
                                    std::string provenance);

/// Digit images with labels 0-9, prior to even/odd merging.
struct RawDigitDataset {
    Matrix features;
    std::vector<int> digits;
    std::string provenance;
};

/// Reads the big-endian IDX pair (images magic 0x00000803, labels magic
/// 0x00000801). Images are flattened row-major; pixel bytes are divided
/// by 255.
RawDigitDataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Whitespace-separated digit data, 257 fields per line: a float digit
/// label followed by 256 features taken as-is.
RawDigitDataset load_usps(const std::string& path);

/// Tab-separated B,G,R,label lines; label 1 (skin) -> class 1, 2 -> class 2.
LabeledDataset load_skin(const std::string& path);

/// Comma-separated file with a header row; the named label column must be
/// binary. Rows whose label equals positive_label become class 1.
LabeledDataset load_csv_labeled(const std::string& path, const std::string& label_column,
                                const std::string& positive_label);

/// Odd digits -> class 1, even digits -> class 2.
LabeledDataset merge_even_odd(const RawDigitDataset& raw);

/// Copy of the given rows (ascending or any order) as a new dataset.
LabeledDataset subset_rows(const LabeledDataset& data, const std::vector<std::int64_t>& rows,
                           const std::string& provenance);

/// Per-class uniform sampling without replacement of floor(fraction*n_g)
/// training rows; the remainder is the test set. Deterministic given seed.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           double train_fraction,
                                                           std::uint64_t seed);

/// Largest subset with class-1 fraction ~= target: keeps all of the
/// limiting class and uniformly sub-samples the other.
LabeledDataset skew_subsample(const LabeledDataset& data, double target_fraction_class1,
                              std::uint64_t seed);

/// i.i.d. Gaussian samples per class, sizes n*pi_g rounded. Cholesky-based.
LabeledDataset synthesize_gaussian(const PopulationModel& pop, std::int64_t n,
                                   std::uint64_t seed);

/// Multivariate t samples (scale mixture of Gaussians) with AR(rho) scale
/// matrix and class means (-1)^g * 1. Equal class sizes n/2.
LabeledDataset synthesize_student_t(std::int64_t n, int p, int df, double rho,
                                    std::uint64_t seed);

} // namespace cda
