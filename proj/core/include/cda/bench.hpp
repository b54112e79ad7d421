#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cda/datasets.hpp"
#include "cda/discriminant.hpp"

namespace cda {

enum class Method {
    FullLDA,
    CompressedLDA,
    ProjectedLDA,
    FRF,
    SubsampledLDA,
    FullQDA,
    CompressedQDA,
    SubsampledQDA,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);
bool method_is_full_data(Method m);

/// Where the training/test data comes from: files for the public datasets,
/// parameters for the synthetic ones.
struct DatasetSpec {
    std::string name;        // zip | mnist | skin | eyestate | csv | gauss | student-t
    std::string train_path;  // usps/skin/csv train file
    std::string test_path;   // usps/csv test file (optional for skin/eyestate/csv)
    std::string images_path; // idx train images
    std::string labels_path; // idx train labels
    std::string test_images_path;
    std::string test_labels_path;
    std::string label_column = "eyeDetection";
    std::string positive_label = "1";
    double train_fraction = 0.9;   // used when no test file exists
    double skew_class1 = 0.0;      // > 0: skew both splits to this class-1 fraction
    std::uint64_t split_seed = 1;  // split / skew / synthesis randomness

    // synthetic parameters
    std::int64_t synth_n = 10000;
    std::int64_t synth_test_n = 10000;
    int synth_p = 10;
    double synth_delta2 = 4.0; // gauss: Mahalanobis separation, identity covariance
    int synth_df = 5;          // student-t
    double synth_rho = 0.9;    // student-t AR parameter
};

/// Shared-covariance Gaussian population with Sigma = I and means +/-delta,
/// delta_j = sqrt(delta2/p).
PopulationModel make_gauss_population(int p, double delta2);

std::pair<LabeledDataset, LabeledDataset> resolve_dataset(const DatasetSpec& spec);

struct ExperimentConfig {
    DatasetSpec dataset;
    std::vector<Method> methods;
    std::vector<std::int64_t> m_grid;
    double s = 0.01;
    double gamma = 1e-4;
    MatrixFamily family = MatrixFamily::SparseRademacher;
    int replications = 100;
    std::uint64_t master_seed = 1;
    std::string out_path;
    bool timing = true; // false writes 0.000 in the time columns
    int threads = 0;    // 0: hardware concurrency

    void validate() const;
};

/// One row of the output CSV.
struct MetricsRecord {
    std::string dataset;
    std::string method;
    std::int64_t m = 0;
    double s = 0.0;
    double gamma = 0.0;
    std::string family;
    std::int64_t rep = 0;
    std::uint64_t seed = 0;
    double error_rate = 0.0;
    double fit_ms = 0.0;
    double compress_ms = 0.0;
    double classify_ms = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "dataset,method,m,s,gamma,family,rep,seed,error_rate,fit_ms,compress_ms,classify_ms";

std::string format_record(const MetricsRecord& r);
MetricsRecord parse_record(const std::string& line);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records);

/// Runs every (method, m, replication) cell on the configured dataset.
/// Full-data methods contribute a single record each (they are
/// deterministic). Cells execute in a worker pool with independent child
/// seeds, seed = derive(master, {method, m, rep}); records come back
/// sorted by that key, so the output does not depend on thread schedule.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg);

/// Same, on already-resolved data.
std::vector<MetricsRecord> run_experiment_on(const LabeledDataset& train,
                                             const LabeledDataset& test,
                                             const ExperimentConfig& cfg);

/// Wall-clock comparison of forming the compressed within-class covariance
/// (sampling Q + compressing + covariance) against forming the full one.
/// Class means are computed outside the timed region; the full formation is
/// repeated once per replication. Rows use methods "compressed-cov" (time in
/// compress_ms) and "full-cov" (time in fit_ms).
std::vector<MetricsRecord> time_covariance_formation(const LabeledDataset& train,
                                                     const std::string& dataset_name,
                                                     const std::vector<std::int64_t>& m_grid,
                                                     double s, MatrixFamily family,
                                                     int replications,
                                                     std::uint64_t master_seed);

/// Writes "pc1,pc2,class" rows for k raw training samples (uniform
/// sub-sample) or k compressed samples (k split per class, then per-class
/// sketches with the given sparsity).
void dump_pca(const LabeledDataset& data, std::int64_t k, const std::string& mode, double s,
              std::uint64_t seed, const std::string& out_path);

struct BoundCurveConfig {
    int p = 10;
    double delta2 = 4.0;
    std::int64_t n = 50000; // training samples per replication
    int replications = 50;
    double s = 0.05;
    double gamma = 0.0;
    std::vector<std::int64_t> m_grid;
    double eta = 0.05;
    double c_const = 1.0;
    std::uint64_t master_seed = 1;
    std::string out_path;
};

struct BoundCurvePoint {
    std::int64_t m = 0;
    double bound = 0.0;
    double median_abs_err = 0.0; // median over replications of |R_c - R_opt|
};

/// For each m: the deviation bound and the median over replications of
/// |R_c - R_opt| on fresh synthetic data, with R_c evaluated exactly by
/// compressed_rule_error. Writes "m,bound,median_abs_err" when out_path
/// is nonempty.
std::vector<BoundCurvePoint> bound_curve(const BoundCurveConfig& cfg);

} // namespace cda
