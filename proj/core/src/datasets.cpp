#include "cda/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "cda/rng.hpp"

namespace cda {

std::vector<std::int64_t> LabeledDataset::class_rows(int g) const {
    std::vector<std::int64_t> rows;
    rows.reserve(static_cast<std::size_t>(g == 1 ? n1 : n2));
    for (std::int64_t i = 0; i < n(); ++i)
        if (labels[static_cast<std::size_t>(i)] == g) rows.push_back(i);
    return rows;
}

Matrix LabeledDataset::class_submatrix(int g) const {
    const std::vector<std::int64_t> rows = class_rows(g);
    Matrix out(static_cast<std::int64_t>(rows.size()), p());
    for (std::size_t k = 0; k < rows.size(); ++k)
        std::copy(features.row(rows[k]), features.row(rows[k]) + p(), out.row(k));
    return out;
}

LabeledDataset make_labeled_dataset(Matrix features, std::vector<int> labels,
                                    std::string provenance) {
    if (features.rows() != static_cast<std::int64_t>(labels.size()))
        throw DimensionMismatch("make_labeled_dataset: label count != row count");
    LabeledDataset d;
    d.features = std::move(features);
    d.labels = std::move(labels);
    d.provenance = std::move(provenance);
    for (int lb : d.labels) {
        if (lb == 1)
            ++d.n1;
        else if (lb == 2)
            ++d.n2;
        else
            throw UnknownLabel("labels must be 1 or 2");
    }
    if (d.n1 == 0 || d.n2 == 0) throw EmptyClass("both classes must be nonempty");
    for (std::int64_t i = 0; i < d.n(); ++i)
        for (std::int64_t j = 0; j < d.p(); ++j)
            if (!std::isfinite(d.features(i, j)))
                throw DataError("non-finite feature value at row " + std::to_string(i));
    return d;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw TruncatedFile("unexpected end of file: " + path);
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

std::ifstream open_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    return in;
}

double parse_double(std::string_view tok, const std::string& context) {
    double value = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw MalformedLine("cannot parse number '" + std::string(tok) + "' in " + context);
    return value;
}

} // namespace

RawDigitDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img = open_binary(images_path);
    if (read_be32(img, images_path) != 0x00000803u)
        throw BadMagic("bad image magic in " + images_path);
    const std::uint32_t count = read_be32(img, images_path);
    const std::uint32_t rows = read_be32(img, images_path);
    const std::uint32_t cols = read_be32(img, images_path);
    if (rows == 0 || cols == 0) throw BadMagic("zero image dimensions in " + images_path);
    const std::int64_t p = static_cast<std::int64_t>(rows) * cols;

    std::ifstream lab = open_binary(labels_path);
    if (read_be32(lab, labels_path) != 0x00000801u)
        throw BadMagic("bad label magic in " + labels_path);
    const std::uint32_t label_count = read_be32(lab, labels_path);
    if (label_count != count)
        throw CountMismatch("image count " + std::to_string(count) + " != label count " +
                            std::to_string(label_count));

    RawDigitDataset out;
    out.provenance = images_path;
    out.features = Matrix(count, p);
    out.digits.resize(count);

    std::vector<unsigned char> buf(static_cast<std::size_t>(p));
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), p))
            throw TruncatedFile("image data truncated: " + images_path);
        double* row = out.features.row(i);
        for (std::int64_t j = 0; j < p; ++j) row[j] = buf[static_cast<std::size_t>(j)] / 255.0;
    }
    std::vector<unsigned char> lbuf(count);
    if (count > 0 && !lab.read(reinterpret_cast<char*>(lbuf.data()), count))
        throw TruncatedFile("label data truncated: " + labels_path);
    for (std::uint32_t i = 0; i < count; ++i) out.digits[i] = lbuf[i];
    return out;
}

RawDigitDataset load_usps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    constexpr int kFeatures = 256;
    std::vector<double> values;
    std::vector<int> digits;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<double> fields;
        double v;
        while (ls >> v) fields.push_back(v);
        if (fields.empty()) continue; // blank line
        if (static_cast<int>(fields.size()) != kFeatures + 1)
            throw MalformedLine(path + ":" + std::to_string(line_no) + ": expected 257 fields, got " +
                                std::to_string(fields.size()));
        const double label = fields[0];
        const int digit = static_cast<int>(std::lround(label));
        if (std::abs(label - digit) > 1e-9 || digit < 0 || digit > 9)
            throw NonDigitLabel(path + ":" + std::to_string(line_no) + ": label " +
                                std::to_string(label));
        digits.push_back(digit);
        values.insert(values.end(), fields.begin() + 1, fields.end());
    }
    if (digits.empty()) throw DataError("no records in " + path);

    RawDigitDataset out;
    out.provenance = path;
    out.digits = std::move(digits);
    out.features = Matrix(static_cast<std::int64_t>(out.digits.size()), kFeatures);
    std::copy(values.begin(), values.end(), out.features.data());
    return out;
}

LabeledDataset load_skin(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::vector<double> values;
    std::vector<int> labels;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> fields;
        double v;
        while (ls >> v) fields.push_back(v);
        if (fields.size() != 4)
            throw MalformedLine(path + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                                std::to_string(fields.size()));
        const int lb = static_cast<int>(fields[3]);
        if (lb != 1 && lb != 2)
            throw UnknownLabel(path + ":" + std::to_string(line_no) + ": label " +
                               std::to_string(fields[3]));
        labels.push_back(lb);
        values.push_back(fields[0]);
        values.push_back(fields[1]);
        values.push_back(fields[2]);
    }
    Matrix feats(static_cast<std::int64_t>(labels.size()), 3);
    std::copy(values.begin(), values.end(), feats.data());
    return make_labeled_dataset(std::move(feats), std::move(labels), path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

} // namespace

LabeledDataset load_csv_labeled(const std::string& path, const std::string& label_column,
                                const std::string& positive_label) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw MalformedCSV(path + ": missing header row");
    const std::vector<std::string> header = split_csv_line(line);
    std::int64_t label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == label_column) label_idx = static_cast<std::int64_t>(i);
    if (label_idx < 0) throw MalformedCSV(path + ": no column named '" + label_column + "'");
    const std::int64_t p = static_cast<std::int64_t>(header.size()) - 1;
    if (p < 1) throw MalformedCSV(path + ": no feature columns");

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw MalformedCSV(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (static_cast<std::int64_t>(i) == label_idx) continue;
            const std::string tok = trim(fields[i]);
            try {
                values.push_back(parse_double(tok, path + ":" + std::to_string(line_no)));
            } catch (const MalformedLine& e) {
                throw MalformedCSV(e.what());
            }
        }
        raw_labels.push_back(trim(fields[static_cast<std::size_t>(label_idx)]));
    }
    if (raw_labels.empty()) throw MalformedCSV(path + ": no data rows");

    std::unordered_set<std::string> distinct(raw_labels.begin(), raw_labels.end());
    if (distinct.size() != 2)
        throw NonBinaryLabels(path + ": " + std::to_string(distinct.size()) +
                              " distinct label values, expected 2");
    if (distinct.find(positive_label) == distinct.end())
        throw NonBinaryLabels(path + ": positive label '" + positive_label + "' not present");

    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (const std::string& r : raw_labels) labels.push_back(r == positive_label ? 1 : 2);
    Matrix feats(static_cast<std::int64_t>(labels.size()), p);
    std::copy(values.begin(), values.end(), feats.data());
    return make_labeled_dataset(std::move(feats), std::move(labels), path);
}

LabeledDataset merge_even_odd(const RawDigitDataset& raw) {
    std::vector<int> labels;
    labels.reserve(raw.digits.size());
    for (int d : raw.digits) {
        if (d < 0 || d > 9) throw UnknownLabel("digit out of range: " + std::to_string(d));
        labels.push_back(d % 2 == 1 ? 1 : 2);
    }
    Matrix feats = raw.features;
    return make_labeled_dataset(std::move(feats), std::move(labels), raw.provenance);
}

namespace {

// Dense lower Cholesky factor of a covariance/scale matrix, for sampling.
std::vector<double> cholesky_lower(const SymMatrix& s, const char* what) {
    const int p = s.dim();
    std::vector<double> lower(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = s(i, j);
            for (int k = 0; k < j; ++k)
                sum -= lower[static_cast<std::size_t>(i) * p + k] *
                       lower[static_cast<std::size_t>(j) * p + k];
            if (i == j) {
                if (sum <= 0.0) throw NotPositiveDefinite(what);
                lower[static_cast<std::size_t>(i) * p + j] = std::sqrt(sum);
            } else {
                lower[static_cast<std::size_t>(i) * p + j] =
                    sum / lower[static_cast<std::size_t>(j) * p + j];
            }
        }
    }
    return lower;
}

} // namespace

LabeledDataset subset_rows(const LabeledDataset& data, const std::vector<std::int64_t>& rows,
                           const std::string& provenance) {
    Matrix feats(static_cast<std::int64_t>(rows.size()), data.p());
    std::vector<int> labels(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        std::copy(data.features.row(rows[k]), data.features.row(rows[k]) + data.p(),
                  feats.row(static_cast<std::int64_t>(k)));
        labels[k] = data.labels[static_cast<std::size_t>(rows[k])];
    }
    return make_labeled_dataset(std::move(feats), std::move(labels), provenance);
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           double train_fraction,
                                                           std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidArgument("stratified_split: fraction must be in (0,1)");

    std::vector<std::int64_t> train_rows, test_rows;
    for (int g = 1; g <= 2; ++g) {
        const std::vector<std::int64_t> rows = data.class_rows(g);
        const std::int64_t take =
            static_cast<std::int64_t>(train_fraction * static_cast<double>(rows.size()));
        if (take == 0 || take == static_cast<std::int64_t>(rows.size()))
            throw EmptyClass("stratified_split: class " + std::to_string(g) +
                             " empty in train or test output");
        Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(g)}));
        const std::vector<std::int64_t> picks =
            sample_without_replacement(static_cast<std::int64_t>(rows.size()), take, rng);
        std::vector<char> in_train(rows.size(), 0);
        for (std::int64_t idx : picks) in_train[static_cast<std::size_t>(idx)] = 1;
        for (std::size_t k = 0; k < rows.size(); ++k)
            (in_train[k] ? train_rows : test_rows).push_back(rows[k]);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {subset_rows(data, train_rows, data.provenance + " [train]"),
            subset_rows(data, test_rows, data.provenance + " [test]")};
}

LabeledDataset skew_subsample(const LabeledDataset& data, double target_fraction_class1,
                              std::uint64_t seed) {
    if (!(target_fraction_class1 > 0.0 && target_fraction_class1 < 1.0))
        throw InfeasibleProportion("skew_subsample: target fraction must be in (0,1)");
    const double t = target_fraction_class1;
    const double current = static_cast<double>(data.n1) / static_cast<double>(data.n());

    // keep all of the limiting class, sub-sample the over-represented one
    std::int64_t keep1 = data.n1, keep2 = data.n2;
    if (current > t) {
        keep1 = std::llround(t * static_cast<double>(data.n2) / (1.0 - t));
        if (keep1 < 1) throw InfeasibleProportion("skew_subsample: class 1 would be empty");
        keep1 = std::min(keep1, data.n1);
    } else if (current < t) {
        keep2 = std::llround((1.0 - t) * static_cast<double>(data.n1) / t);
        if (keep2 < 1) throw InfeasibleProportion("skew_subsample: class 2 would be empty");
        keep2 = std::min(keep2, data.n2);
    }

    std::vector<std::int64_t> kept;
    for (int g = 1; g <= 2; ++g) {
        const std::vector<std::int64_t> rows = data.class_rows(g);
        const std::int64_t keep = (g == 1 ? keep1 : keep2);
        if (keep == static_cast<std::int64_t>(rows.size())) {
            kept.insert(kept.end(), rows.begin(), rows.end());
        } else {
            Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(g)}));
            for (std::int64_t idx :
                 sample_without_replacement(static_cast<std::int64_t>(rows.size()), keep, rng))
                kept.push_back(rows[static_cast<std::size_t>(idx)]);
        }
    }
    std::sort(kept.begin(), kept.end());
    return subset_rows(data, kept, data.provenance + " [skewed]");
}

LabeledDataset synthesize_gaussian(const PopulationModel& pop, std::int64_t n,
                                   std::uint64_t seed) {
    pop.validate();
    const int p = pop.dim();
    const std::int64_t n1 = std::llround(pop.prior1 * static_cast<double>(n));
    const std::int64_t n2 = n - n1;
    if (n1 < 1 || n2 < 1) throw EmptyClass("synthesize_gaussian: a class would be empty");

    Matrix feats(n, p);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(static_cast<std::size_t>(p));

    std::int64_t row = 0;
    for (int g = 1; g <= 2; ++g) {
        const std::vector<double>& mu = (g == 1 ? pop.mu1 : pop.mu2);
        const std::int64_t count = (g == 1 ? n1 : n2);
        // x = mu + L z with z standard normal; L from the class covariance
        const std::vector<double> lower =
            cholesky_lower(pop.class_sigma(g), "synthesize_gaussian: sigma not PD");
        for (std::int64_t k = 0; k < count; ++k, ++row) {
            for (int i = 0; i < p; ++i) z[static_cast<std::size_t>(i)] = gauss(rng);
            double* dst = feats.row(row);
            for (int i = 0; i < p; ++i) {
                double acc = mu[static_cast<std::size_t>(i)];
                const double* li = lower.data() + static_cast<std::size_t>(i) * p;
                for (int j = 0; j <= i; ++j) acc += li[j] * z[static_cast<std::size_t>(j)];
                dst[i] = acc;
            }
            labels[static_cast<std::size_t>(row)] = g;
        }
    }
    return make_labeled_dataset(std::move(feats), std::move(labels), "synthetic-gaussian");
}

LabeledDataset synthesize_student_t(std::int64_t n, int p, int df, double rho,
                                    std::uint64_t seed) {
    if (df < 3) throw InvalidArgument("synthesize_student_t: df must be >= 3");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("synthesize_student_t: rho in [0,1)");
    if (n < 2) throw InvalidArgument("synthesize_student_t: n must be >= 2");

    // AR(rho) scale matrix and its Cholesky factor
    SymMatrix scale(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) scale.set(i, j, std::pow(rho, j - i));
    const std::vector<double> lower =
        cholesky_lower(scale, "synthesize_student_t: AR matrix not PD");

    const std::int64_t n1 = n / 2;
    const std::int64_t n2 = n - n1;
    Matrix feats(n, p);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::chi_squared_distribution<double> chisq(static_cast<double>(df));
    std::vector<double> z(static_cast<std::size_t>(p));

    std::int64_t row = 0;
    for (int g = 1; g <= 2; ++g) {
        const double mu = (g == 1 ? -1.0 : 1.0); // (-1)^g
        const std::int64_t count = (g == 1 ? n1 : n2);
        for (std::int64_t k = 0; k < count; ++k, ++row) {
            for (int i = 0; i < p; ++i) z[static_cast<std::size_t>(i)] = gauss(rng);
            const double mix = std::sqrt(chisq(rng) / static_cast<double>(df));
            double* dst = feats.row(row);
            for (int i = 0; i < p; ++i) {
                double acc = 0.0;
                const double* li = lower.data() + static_cast<std::size_t>(i) * p;
                for (int j = 0; j <= i; ++j) acc += li[j] * z[static_cast<std::size_t>(j)];
                dst[i] = mu + acc / mix;
            }
            labels[static_cast<std::size_t>(row)] = g;
        }
    }
    return make_labeled_dataset(std::move(feats), std::move(labels), "synthetic-student-t");
}

} // namespace cda
