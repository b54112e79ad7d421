// Benchmark CLI: error-rate sweeps, covariance-formation timing, PCA dumps
// and deviation-bound curves, all emitting CSV.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "cda/bench.hpp"

namespace {

struct CommonArgs {
    cda::DatasetSpec dataset;
    std::vector<std::string> methods = {"compressed-lda"};
    std::vector<std::string> m_list;
    double s = 0.01;
    double gamma = 1e-4;
    std::string family = "rademacher";
    int reps = 100;
    std::uint64_t seed = 1;
    std::string out;
    std::string timing = "on";
    int threads = 0;
};

// command lines pass comma lists in one token, config files may split them
std::vector<std::string> split_commas(const std::vector<std::string>& texts) {
    std::vector<std::string> parts;
    for (const std::string& text : texts) {
        std::string cur;
        for (char c : text) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) parts.push_back(cur);
    }
    return parts;
}

std::vector<std::int64_t> parse_grid(const std::vector<std::string>& texts) {
    std::vector<std::int64_t> grid;
    for (const std::string& part : split_commas(texts)) {
        try {
            grid.push_back(std::stoll(part));
        } catch (const std::exception&) {
            throw cda::ConfigError("bad m grid entry: " + part);
        }
    }
    return grid;
}

void add_dataset_options(CLI::App* cmd, cda::DatasetSpec& spec) {
    cmd->add_option("--dataset", spec.name,
                    "zip | mnist | skin | eyestate | csv | gauss | student-t")
        ->required();
    cmd->add_option("--train", spec.train_path, "training file (zip/skin/eyestate/csv)");
    cmd->add_option("--test", spec.test_path, "test file (zip/csv)");
    cmd->add_option("--images", spec.images_path, "idx training images (mnist)");
    cmd->add_option("--labels", spec.labels_path, "idx training labels (mnist)");
    cmd->add_option("--test-images", spec.test_images_path, "idx test images (mnist)");
    cmd->add_option("--test-labels", spec.test_labels_path, "idx test labels (mnist)");
    cmd->add_option("--label-column", spec.label_column, "csv label column name");
    cmd->add_option("--positive-label", spec.positive_label, "csv label mapped to class 1");
    cmd->add_option("--train-frac", spec.train_fraction,
                    "training fraction for datasets without a test file");
    cmd->add_option("--skew-class1", spec.skew_class1,
                    "skew both splits to this class-1 fraction");
    cmd->add_option("--split-seed", spec.split_seed, "seed for splits/skews/synthesis");
    cmd->add_option("--n", spec.synth_n, "synthetic training sample count");
    cmd->add_option("--test-n", spec.synth_test_n, "synthetic test sample count");
    cmd->add_option("--p", spec.synth_p, "synthetic feature count");
    cmd->add_option("--delta2", spec.synth_delta2, "gauss: Mahalanobis separation");
    cmd->add_option("--df", spec.synth_df, "student-t degrees of freedom");
    cmd->add_option("--rho", spec.synth_rho, "student-t AR parameter");
}

int run_bench(const CommonArgs& args) {
    cda::ExperimentConfig cfg;
    cfg.dataset = args.dataset;
    for (const std::string& name : split_commas(args.methods))
        cfg.methods.push_back(cda::method_from_name(name));
    cfg.m_grid = parse_grid(args.m_list);
    cfg.s = args.s;
    cfg.gamma = args.gamma;
    cfg.family = cda::family_from_name(args.family);
    cfg.replications = args.reps;
    cfg.master_seed = args.seed;
    cfg.out_path = args.out;
    cfg.timing = args.timing != "off";
    cfg.threads = args.threads;
    cfg.validate();

    const std::vector<cda::MetricsRecord> records = cda::run_experiment(cfg);
    if (cfg.out_path.empty()) {
        std::puts(cda::kMetricsHeader);
        for (const cda::MetricsRecord& r : records) std::puts(cda::format_record(r).c_str());
    } else {
        std::fprintf(stderr, "wrote %zu records to %s\n", records.size(), cfg.out_path.c_str());
    }
    return 0;
}

int run_time_cov(const CommonArgs& args) {
    const auto [train, test] = cda::resolve_dataset(args.dataset);
    (void)test;
    const std::vector<cda::MetricsRecord> records = cda::time_covariance_formation(
        train, args.dataset.name, parse_grid(args.m_list), args.s,
        cda::family_from_name(args.family), args.reps, args.seed);
    if (args.out.empty()) {
        std::puts(cda::kMetricsHeader);
        for (const cda::MetricsRecord& r : records) std::puts(cda::format_record(r).c_str());
    } else {
        cda::write_metrics_csv(args.out, records);
        std::fprintf(stderr, "wrote %zu records to %s\n", records.size(), args.out.c_str());
    }
    return 0;
}

int run_pca_dump(const CommonArgs& args, std::int64_t k, const std::string& mode) {
    const auto [train, test] = cda::resolve_dataset(args.dataset);
    (void)test;
    cda::dump_pca(train, k, mode, args.s, args.seed, args.out);
    std::fprintf(stderr, "wrote %s\n", args.out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Per-class sparse-compression discriminant analysis benchmarks"};
    app.require_subcommand(1);
    // key=value config files use one [subcommand] section per subcommand and
    // are given before the subcommand: cda --config run.ini bench
    app.set_config("--config");

    CommonArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "replicated error-rate sweeps");
    add_dataset_options(bench, bench_args.dataset);
    bench->add_option("--methods", bench_args.methods, "comma list of methods");
    bench->add_option("--m", bench_args.m_list, "comma list of reduced sample counts");
    bench->add_option("--s", bench_args.s, "compression sparsity");
    bench->add_option("--gamma", bench_args.gamma, "ridge added to covariance estimates");
    bench->add_option("--family", bench_args.family, "rademacher | gaussian | countsketch");
    bench->add_option("--reps", bench_args.reps, "replications per grid value");
    bench->add_option("--seed", bench_args.seed, "master seed");
    bench->add_option("--out", bench_args.out, "output CSV path");
    bench->add_option("--timing", bench_args.timing, "on | off (off zeroes time columns)");
    bench->add_option("--threads", bench_args.threads, "worker threads (0 = hardware)");

    CommonArgs time_args;
    CLI::App* timecov = app.add_subcommand("time-cov", "covariance formation timing");
    add_dataset_options(timecov, time_args.dataset);
    timecov->add_option("--m", time_args.m_list, "comma list of reduced sample counts");
    timecov->add_option("--s", time_args.s, "compression sparsity");
    timecov->add_option("--family", time_args.family, "rademacher | gaussian | countsketch");
    timecov->add_option("--reps", time_args.reps, "replications");
    timecov->add_option("--seed", time_args.seed, "master seed");
    timecov->add_option("--out", time_args.out, "output CSV path");

    CommonArgs pca_args;
    std::int64_t pca_k = 5000;
    std::string pca_mode = "raw";
    CLI::App* pca = app.add_subcommand("pca-dump", "two leading principal components to CSV");
    add_dataset_options(pca, pca_args.dataset);
    pca->add_option("--k", pca_k, "sample count to project");
    pca->add_option("--mode", pca_mode, "raw | compressed");
    pca->add_option("--s", pca_args.s, "sparsity for compressed mode");
    pca->add_option("--seed", pca_args.seed, "seed");
    pca->add_option("--out", pca_args.out, "output CSV path")->required();

    cda::BoundCurveConfig curve_cfg;
    std::vector<std::string> curve_m = {"100,200,400,800,1600,3200"};
    CLI::App* curve = app.add_subcommand("bound-curve",
                                         "deviation bound vs empirical |R_c - R_opt|");
    curve->add_option("--m", curve_m, "comma list of reduced sample counts");
    curve->add_option("--p", curve_cfg.p, "population dimension");
    curve->add_option("--delta2", curve_cfg.delta2, "Mahalanobis separation");
    curve->add_option("--n", curve_cfg.n, "training samples per replication");
    curve->add_option("--reps", curve_cfg.replications, "replications");
    curve->add_option("--s", curve_cfg.s, "compression sparsity");
    curve->add_option("--gamma", curve_cfg.gamma, "ridge on the compressed covariance");
    curve->add_option("--eta", curve_cfg.eta, "bound confidence parameter");
    curve->add_option("--c-const", curve_cfg.c_const, "absolute constant C");
    curve->add_option("--seed", curve_cfg.master_seed, "master seed");
    curve->add_option("--out", curve_cfg.out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (bench->parsed()) return run_bench(bench_args);
        if (timecov->parsed()) return run_time_cov(time_args);
        if (pca->parsed()) return run_pca_dump(pca_args, pca_k, pca_mode);
        if (curve->parsed()) {
            curve_cfg.m_grid = parse_grid(curve_m);
            cda::bound_curve(curve_cfg);
            std::fprintf(stderr, "wrote %s\n", curve_cfg.out_path.c_str());
            return 0;
        }
    } catch (const cda::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const cda::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const cda::Error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
