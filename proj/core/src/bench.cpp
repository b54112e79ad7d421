#include "cda/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cda/rng.hpp"
#include "cda/theory.hpp"

namespace cda {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::FullLDA: return "full-lda";
        case Method::CompressedLDA: return "compressed-lda";
        case Method::ProjectedLDA: return "projected-lda";
        case Method::FRF: return "frf";
        case Method::SubsampledLDA: return "subsampled-lda";
        case Method::FullQDA: return "full-qda";
        case Method::CompressedQDA: return "compressed-qda";
        case Method::SubsampledQDA: return "subsampled-qda";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    for (Method m : {Method::FullLDA, Method::CompressedLDA, Method::ProjectedLDA, Method::FRF,
                     Method::SubsampledLDA, Method::FullQDA, Method::CompressedQDA,
                     Method::SubsampledQDA})
        if (method_name(m) == name) return m;
    throw InvalidArgument("unknown method: " + name);
}

bool method_is_full_data(Method m) {
    return m == Method::FullLDA || m == Method::FullQDA;
}

PopulationModel make_gauss_population(int p, double delta2) {
    if (p < 1 || delta2 < 0.0) throw InvalidArgument("make_gauss_population: bad parameters");
    PopulationModel pop;
    pop.sigma1 = SymMatrix::identity(p);
    const double coord = std::sqrt(delta2 / static_cast<double>(p));
    pop.mu1.assign(p, coord);
    pop.mu2.assign(p, -coord);
    return pop;
}

std::pair<LabeledDataset, LabeledDataset> resolve_dataset(const DatasetSpec& spec) {
    std::pair<LabeledDataset, LabeledDataset> out;
    if (spec.name == "zip") {
        out.first = merge_even_odd(load_usps(spec.train_path));
        out.second = merge_even_odd(load_usps(spec.test_path));
    } else if (spec.name == "mnist") {
        out.first = merge_even_odd(load_idx(spec.images_path, spec.labels_path));
        out.second = merge_even_odd(load_idx(spec.test_images_path, spec.test_labels_path));
    } else if (spec.name == "skin") {
        out = stratified_split(load_skin(spec.train_path), spec.train_fraction, spec.split_seed);
    } else if (spec.name == "eyestate" || spec.name == "csv") {
        const LabeledDataset all =
            load_csv_labeled(spec.train_path, spec.label_column, spec.positive_label);
        if (!spec.test_path.empty()) {
            out.first = all;
            out.second = load_csv_labeled(spec.test_path, spec.label_column, spec.positive_label);
        } else {
            out = stratified_split(all, spec.train_fraction, spec.split_seed);
        }
    } else if (spec.name == "gauss") {
        const PopulationModel pop = make_gauss_population(spec.synth_p, spec.synth_delta2);
        out.first = synthesize_gaussian(pop, spec.synth_n, derive_seed(spec.split_seed, {1}));
        out.second = synthesize_gaussian(pop, spec.synth_test_n, derive_seed(spec.split_seed, {2}));
    } else if (spec.name == "student-t") {
        out.first = synthesize_student_t(spec.synth_n, spec.synth_p, spec.synth_df,
                                         spec.synth_rho, derive_seed(spec.split_seed, {1}));
        out.second = synthesize_student_t(spec.synth_test_n, spec.synth_p, spec.synth_df,
                                          spec.synth_rho, derive_seed(spec.split_seed, {2}));
    } else {
        throw InvalidArgument("unknown dataset: " + spec.name);
    }
    if (spec.skew_class1 > 0.0) {
        out.first = skew_subsample(out.first, spec.skew_class1, derive_seed(spec.split_seed, {3}));
        out.second = skew_subsample(out.second, spec.skew_class1, derive_seed(spec.split_seed, {4}));
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw InvalidArgument("config: no methods selected");
    if (replications < 1) throw InvalidArgument("config: replications must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("config: s must lie in (0,1)");
    if (gamma < 0.0) throw InvalidArgument("config: gamma must be >= 0");
    bool needs_grid = false;
    for (Method m : methods)
        if (!method_is_full_data(m)) needs_grid = true;
    if (needs_grid && m_grid.empty()) throw InvalidArgument("config: empty m grid");
    for (std::int64_t m : m_grid)
        if (m < 2) throw InvalidArgument("config: grid values must be >= 2");
}

namespace {

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

} // namespace

std::string format_record(const MetricsRecord& r) {
    std::ostringstream os;
    os << r.dataset << ',' << r.method << ',' << r.m << ',' << format_double(r.s, "%.10g") << ','
       << format_double(r.gamma, "%.10g") << ',' << r.family << ',' << r.rep << ',' << r.seed
       << ',' << format_double(r.error_rate, "%.10g") << ',' << format_double(r.fit_ms, "%.3f")
       << ',' << format_double(r.compress_ms, "%.3f") << ','
       << format_double(r.classify_ms, "%.3f");
    return os.str();
}

MetricsRecord parse_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    if (fields.size() != 12) throw MalformedCSV("metrics row needs 12 fields");
    MetricsRecord r;
    r.dataset = fields[0];
    r.method = fields[1];
    r.m = std::stoll(fields[2]);
    r.s = std::stod(fields[3]);
    r.gamma = std::stod(fields[4]);
    r.family = fields[5];
    r.rep = std::stoll(fields[6]);
    r.seed = std::stoull(fields[7]);
    r.error_rate = std::stod(fields[8]);
    r.fit_ms = std::stod(fields[9]);
    r.compress_ms = std::stod(fields[10]);
    r.classify_ms = std::stod(fields[11]);
    if (!(r.error_rate >= 0.0 && r.error_rate <= 1.0))
        throw MalformedCSV("error_rate outside [0,1]");
    if (r.fit_ms < 0.0 || r.compress_ms < 0.0 || r.classify_ms < 0.0)
        throw MalformedCSV("negative time");
    return r;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << kMetricsHeader << '\n';
    for (const MetricsRecord& r : records) out << format_record(r) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

namespace {

struct Cell {
    Method method;
    std::int64_t m;
    std::int64_t rep;
};

int method_id(Method m) { return static_cast<int>(m); }

MetricsRecord run_cell(const LabeledDataset& train, const LabeledDataset& test,
                       const ExperimentConfig& cfg, const Cell& cell) {
    MetricsRecord rec;
    rec.dataset = cfg.dataset.name;
    rec.method = method_name(cell.method);
    rec.m = cell.m;
    rec.gamma = cfg.gamma;
    rec.family = family_name(cfg.family);
    rec.rep = cell.rep;
    rec.seed = derive_seed(cfg.master_seed,
                           {static_cast<std::uint64_t>(method_id(cell.method)),
                            static_cast<std::uint64_t>(cell.m),
                            static_cast<std::uint64_t>(cell.rep)});

    FitConfig fit_cfg;
    fit_cfg.m = cell.m;
    fit_cfg.s = cfg.s;
    fit_cfg.gamma = cfg.gamma;
    fit_cfg.family = cfg.family;
    fit_cfg.seed = rec.seed;
    FitBreakdown breakdown;

    const bool full = method_is_full_data(cell.method);
    rec.s = full ? 0.0 : cfg.s;

    double err = 0.0;
    double classify_ms = 0.0;
    switch (cell.method) {
        case Method::FullLDA:
        case Method::CompressedLDA:
        case Method::ProjectedLDA:
        case Method::FRF:
        case Method::SubsampledLDA: {
            LinearVariant v = LinearVariant::Full;
            if (cell.method == Method::CompressedLDA) v = LinearVariant::Compressed;
            if (cell.method == Method::ProjectedLDA) v = LinearVariant::Projected;
            if (cell.method == Method::FRF) v = LinearVariant::FRF;
            if (cell.method == Method::SubsampledLDA) v = LinearVariant::Subsampled;
            const LinearModel model = fit_linear(train, v, fit_cfg, &breakdown);
            const Clock::time_point t0 = Clock::now();
            err = misclassification_rate(model, test);
            classify_ms = ms_since(t0);
            break;
        }
        case Method::FullQDA:
        case Method::CompressedQDA:
        case Method::SubsampledQDA: {
            QuadraticVariant v = QuadraticVariant::Full;
            if (cell.method == Method::CompressedQDA) v = QuadraticVariant::Compressed;
            if (cell.method == Method::SubsampledQDA) v = QuadraticVariant::Subsampled;
            const QuadraticModel model = fit_quadratic(train, v, fit_cfg, &breakdown);
            const Clock::time_point t0 = Clock::now();
            err = misclassification_rate(model, test);
            classify_ms = ms_since(t0);
            break;
        }
    }
    rec.error_rate = err;
    if (cfg.timing) {
        rec.fit_ms = breakdown.total_ms;
        rec.compress_ms = breakdown.compress_ms;
        rec.classify_ms = classify_ms;
    }
    return rec;
}

} // namespace

std::vector<MetricsRecord> run_experiment_on(const LabeledDataset& train,
                                             const LabeledDataset& test,
                                             const ExperimentConfig& cfg) {
    cfg.validate();

    std::vector<Cell> cells;
    for (Method method : cfg.methods) {
        if (method_is_full_data(method)) {
            cells.push_back({method, train.n(), 0});
        } else {
            for (std::int64_t m : cfg.m_grid)
                for (int rep = 0; rep < cfg.replications; ++rep) cells.push_back({method, m, rep});
        }
    }

    std::vector<MetricsRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::string failed_cell;
    int error_kind = 0; // 1 config, 2 data, 3 numeric, 4 other
    std::string error_message;

    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (error_kind != 0) return;
            }
            try {
                records[idx] = run_cell(train, test, cfg, cells[idx]);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (error_kind == 0) {
                    failed_cell = method_name(cells[idx].method) + " m=" +
                                  std::to_string(cells[idx].m) +
                                  " rep=" + std::to_string(cells[idx].rep);
                    error_message = e.what();
                    if (dynamic_cast<const ConfigError*>(&e))
                        error_kind = 1;
                    else if (dynamic_cast<const DataError*>(&e))
                        error_kind = 2;
                    else if (dynamic_cast<const NumericError*>(&e))
                        error_kind = 3;
                    else
                        error_kind = 4;
                }
            }
        }
    };

    int nthreads = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(cells.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    if (error_kind != 0) {
        const std::string msg = "cell [" + failed_cell + "]: " + error_message;
        switch (error_kind) {
            case 1: throw ConfigError(msg);
            case 2: throw DataError(msg);
            case 3: throw NumericError(msg);
            default: throw Error(msg);
        }
    }

    std::sort(records.begin(), records.end(),
              [](const MetricsRecord& a, const MetricsRecord& b) {
                  if (a.method != b.method) return a.method < b.method;
                  if (a.m != b.m) return a.m < b.m;
                  return a.rep < b.rep;
              });
    if (!cfg.out_path.empty()) write_metrics_csv(cfg.out_path, records);
    return records;
}

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto [train, test] = resolve_dataset(cfg.dataset);
    return run_experiment_on(train, test, cfg);
}

std::vector<MetricsRecord> time_covariance_formation(const LabeledDataset& train,
                                                     const std::string& dataset_name,
                                                     const std::vector<std::int64_t>& m_grid,
                                                     double s, MatrixFamily family,
                                                     int replications,
                                                     std::uint64_t master_seed) {
    if (replications < 1) throw InvalidArgument("time_covariance_formation: replications >= 1");
    const ClassStatistics stats = class_statistics(train);
    const std::vector<std::int64_t> rows1 = train.class_rows(1);
    const std::vector<std::int64_t> rows2 = train.class_rows(2);
    std::vector<MetricsRecord> records;

    for (std::int64_t m : m_grid) {
        const auto [m1, m2] = split_compression_sizes(stats.n1, stats.n2, m);
        for (int rep = 0; rep < replications; ++rep) {
            MetricsRecord rec;
            rec.dataset = dataset_name;
            rec.method = "compressed-cov";
            rec.m = m;
            rec.s = s;
            rec.family = family_name(family);
            rec.rep = rep;
            rec.seed = derive_seed(master_seed, {100, static_cast<std::uint64_t>(m),
                                                 static_cast<std::uint64_t>(rep)});
            const Clock::time_point t0 = Clock::now();
            const SparseCompressionMatrix q1 =
                sample_compression_matrix(family, m1, stats.n1, s, derive_seed(rec.seed, {1}));
            const SparseCompressionMatrix q2 =
                sample_compression_matrix(family, m2, stats.n2, s, derive_seed(rec.seed, {2}));
            const CompressedClassData c1 = compress_rows(train.features, rows1, stats.mean1, q1, 1);
            const CompressedClassData c2 = compress_rows(train.features, rows2, stats.mean2, q2, 2);
            const SymMatrix sigma_c = compressed_within_class_covariance(c1, c2, stats);
            rec.compress_ms = ms_since(t0);
            (void)sigma_c;
            records.push_back(rec);
        }
    }
    for (int rep = 0; rep < replications; ++rep) {
        MetricsRecord rec;
        rec.dataset = dataset_name;
        rec.method = "full-cov";
        rec.m = train.n();
        rec.rep = rep;
        rec.seed = derive_seed(master_seed, {101, static_cast<std::uint64_t>(rep)});
        const Clock::time_point t0 = Clock::now();
        const SymMatrix sigma = within_class_covariance(train, stats);
        rec.fit_ms = ms_since(t0);
        (void)sigma;
        records.push_back(rec);
    }
    return records;
}

void dump_pca(const LabeledDataset& data, std::int64_t k, const std::string& mode, double s,
              std::uint64_t seed, const std::string& out_path) {
    if (k < 1) throw InvalidArgument("dump_pca: k must be >= 1");
    Matrix points;
    std::vector<int> labels;

    if (mode == "raw") {
        if (k > data.n()) throw InvalidArgument("dump_pca: k exceeds sample count");
        Rng rng = make_rng(seed);
        const std::vector<std::int64_t> rows = sample_without_replacement(data.n(), k, rng);
        points = Matrix(k, data.p());
        labels.resize(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::copy(data.features.row(rows[i]), data.features.row(rows[i]) + data.p(),
                      points.row(static_cast<std::int64_t>(i)));
            labels[i] = data.labels[static_cast<std::size_t>(rows[i])];
        }
    } else if (mode == "compressed") {
        const ClassStatistics stats = class_statistics(data);
        const auto [k1, k2] = split_compression_sizes(stats.n1, stats.n2, k);
        const SparseCompressionMatrix q1 =
            sample_compression_matrix(MatrixFamily::SparseRademacher, k1, stats.n1, s,
                                      derive_seed(seed, {1}));
        const SparseCompressionMatrix q2 =
            sample_compression_matrix(MatrixFamily::SparseRademacher, k2, stats.n2, s,
                                      derive_seed(seed, {2}));
        const CompressedClassData c1 =
            compress_rows(data.features, data.class_rows(1), stats.mean1, q1, 1);
        const CompressedClassData c2 =
            compress_rows(data.features, data.class_rows(2), stats.mean2, q2, 2);
        points = Matrix(k1 + k2, data.p());
        labels.resize(static_cast<std::size_t>(k1 + k2));
        for (std::int64_t j = 0; j < k1; ++j) {
            std::copy(c1.samples.row(j), c1.samples.row(j) + data.p(), points.row(j));
            labels[static_cast<std::size_t>(j)] = 1;
        }
        for (std::int64_t j = 0; j < k2; ++j) {
            std::copy(c2.samples.row(j), c2.samples.row(j) + data.p(), points.row(k1 + j));
            labels[static_cast<std::size_t>(k1 + j)] = 2;
        }
    } else {
        throw InvalidArgument("dump_pca: mode must be raw or compressed");
    }

    const Matrix pcs = pca_top2(points);
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write " + out_path);
    out << "pc1,pc2,class\n";
    char buf[128];
    for (std::int64_t i = 0; i < pcs.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d\n", pcs(i, 0), pcs(i, 1),
                      labels[static_cast<std::size_t>(i)]);
        out << buf;
    }
    if (!out) throw DataError("write failed: " + out_path);
}

std::vector<BoundCurvePoint> bound_curve(const BoundCurveConfig& cfg) {
    if (cfg.m_grid.empty()) throw InvalidArgument("bound_curve: empty m grid");
    if (cfg.replications < 1) throw InvalidArgument("bound_curve: replications >= 1");
    const PopulationModel pop = make_gauss_population(cfg.p, cfg.delta2);
    const double r_opt = bayes_error(pop);

    std::vector<std::vector<double>> errs(cfg.m_grid.size());
    for (int rep = 0; rep < cfg.replications; ++rep) {
        const LabeledDataset data = synthesize_gaussian(
            pop, cfg.n, derive_seed(cfg.master_seed, {7, static_cast<std::uint64_t>(rep)}));
        const ClassStatistics stats = class_statistics(data);
        const std::vector<std::int64_t> rows1 = data.class_rows(1);
        const std::vector<std::int64_t> rows2 = data.class_rows(2);
        for (std::size_t gi = 0; gi < cfg.m_grid.size(); ++gi) {
            const std::int64_t m = cfg.m_grid[gi];
            const auto [m1, m2] = split_compression_sizes(stats.n1, stats.n2, m);
            const std::uint64_t cell_seed =
                derive_seed(cfg.master_seed, {8, static_cast<std::uint64_t>(m),
                                              static_cast<std::uint64_t>(rep)});
            const SparseCompressionMatrix q1 = sample_compression_matrix(
                MatrixFamily::SparseRademacher, m1, stats.n1, cfg.s, derive_seed(cell_seed, {1}));
            const SparseCompressionMatrix q2 = sample_compression_matrix(
                MatrixFamily::SparseRademacher, m2, stats.n2, cfg.s, derive_seed(cell_seed, {2}));
            const CompressedClassData c1 = compress_rows(data.features, rows1, stats.mean1, q1, 1);
            const CompressedClassData c2 = compress_rows(data.features, rows2, stats.mean2, q2, 2);
            SymMatrix sigma_c = compressed_within_class_covariance(c1, c2, stats);
            if (cfg.gamma > 0.0)
                for (int i = 0; i < sigma_c.dim(); ++i) sigma_c.add(i, i, cfg.gamma);
            const double r_c = compressed_rule_error(pop, stats.mean_difference, sigma_c,
                                                     stats.mean1, stats.mean2);
            errs[gi].push_back(std::abs(r_c - r_opt));
        }
    }

    std::vector<BoundCurvePoint> points;
    for (std::size_t gi = 0; gi < cfg.m_grid.size(); ++gi) {
        BoundCurvePoint pt;
        pt.m = cfg.m_grid[gi];
        pt.bound = deviation_bound(pop, cfg.s, pt.m, cfg.p, cfg.eta, cfg.c_const);
        std::vector<double>& e = errs[gi];
        std::sort(e.begin(), e.end());
        const std::size_t n = e.size();
        pt.median_abs_err = n % 2 == 1 ? e[n / 2] : 0.5 * (e[n / 2 - 1] + e[n / 2]);
        points.push_back(pt);
    }

    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw DataError("cannot write " + cfg.out_path);
        out << "m,bound,median_abs_err\n";
        char buf[128];
        for (const BoundCurvePoint& pt : points) {
            std::snprintf(buf, sizeof buf, "%lld,%.10g,%.10g\n",
                          static_cast<long long>(pt.m), pt.bound, pt.median_abs_err);
            out << buf;
        }
        if (!out) throw DataError("write failed: " + cfg.out_path);
    }
    return points;
}

} // namespace cda
