#include "sdreg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "sdreg/errors.hpp"

namespace sdreg {

void Dataset::validate() const {
    if (features.rows() < 1) throw DimensionMismatch("dataset: no rows");
    if (features.cols() < 1) throw DimensionMismatch("dataset: no columns");
    if (static_cast<long>(labels.size()) != features.rows())
        throw DimensionMismatch("dataset: label count " + std::to_string(labels.size()) +
                                " vs row count " + std::to_string(features.rows()));
    for (long i = 0; i < features.rows(); ++i) {
        if (labels[static_cast<std::size_t>(i)] != 0 && labels[static_cast<std::size_t>(i)] != 1)
            throw NonBinaryLabels("dataset: label not in {0,1} at row " + std::to_string(i));
        for (long j = 0; j < features.cols(); ++j)
            if (!std::isfinite(features(i, j)))
                throw NonFinite("dataset: non-finite feature at row " + std::to_string(i));
    }
}

Batch full_batch(long n) {
    Batch b;
    b.indices.resize(static_cast<std::size_t>(n));
    std::iota(b.indices.begin(), b.indices.end(), 0);
    return b;
}

Batch sample_batch(long n, int m, Rng& rng) {
    if (m < 1) throw DimensionMismatch("sample_batch: batch size < 1");
    Batch b;
    b.indices = rng.sample_without_replacement(n, m);
    return b;
}

SynthResult synth_generate(long n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw DimensionMismatch("synth_generate: need n >= 1 and d >= 1");
    Rng rng(seed);
    SynthResult out;
    out.theta_bar.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) out.theta_bar[static_cast<std::size_t>(j)] = rng.uniform(-1.0, 1.0);
    out.data.features = Matrix(n, d);
    out.data.labels.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        double margin = 0.0;
        for (int j = 0; j < d; ++j) {
            const double v = rng.uniform01();
            out.data.features(i, j) = v;
            margin += out.theta_bar[static_cast<std::size_t>(j)] * v;
        }
        // ties (margin == 0) fall to label 0
        out.data.labels[static_cast<std::size_t>(i)] = margin > 0.0 ? 1 : 0;
    }
    out.data.name = "synth-n" + std::to_string(n) + "-d" + std::to_string(d);
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_delimited(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::string line;
    long line_no = 0;
    long n_fields = -1;
    bool skipped_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        if (opts.has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<std::string> fields = split_line(line, opts.delimiter);
        if (n_fields < 0) {
            n_fields = static_cast<long>(fields.size());
            if (n_fields < 2) throw ParseError("need at least one feature and a label", line_no);
        } else if (static_cast<long>(fields.size()) != n_fields) {
            throw ParseError("expected " + std::to_string(n_fields) + " fields, got " +
                             std::to_string(fields.size()), line_no);
        }
        long label_col = opts.label_column < 0 ? n_fields - 1 : opts.label_column;
        if (label_col >= n_fields)
            throw MissingColumn("label column " + std::to_string(label_col) +
                                " out of range, row has " + std::to_string(n_fields) + " fields");
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(n_fields - 1));
        for (long j = 0; j < n_fields; ++j) {
            const std::string cell = trimmed(fields[static_cast<std::size_t>(j)]);
            if (j == label_col) {
                raw_labels.push_back(cell);
                continue;
            }
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ParseError("cannot parse numeric field '" + cell + "'", line_no);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows", line_no == 0 ? 1 : line_no);

    std::set<std::string> classes(raw_labels.begin(), raw_labels.end());
    if (classes.size() != 2)
        throw NonBinaryLabels("expected exactly 2 label classes, found " +
                              std::to_string(classes.size()));
    if (!classes.contains(opts.positive_label))
        throw NonBinaryLabels("positive label '" + opts.positive_label +
                              "' not present in the file");

    Dataset data;
    const long n = static_cast<long>(rows.size());
    const long d = static_cast<long>(rows.front().size());
    data.features = Matrix(n, d);
    data.labels.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < d; ++j) data.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        data.labels[static_cast<std::size_t>(i)] =
            raw_labels[static_cast<std::size_t>(i)] == opts.positive_label ? 1 : 0;
    }
    data.name = path;
    if (opts.standardize) standardize_features(data);
    if (opts.add_bias) append_bias_column(data);
    data.validate();
    return data;
}

void save_delimited(const Dataset& data, const std::string& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    char buf[64];
    for (long i = 0; i < data.size(); ++i) {
        for (long j = 0; j < data.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.features(i, j));
            out << buf << delimiter;
        }
        out << data.labels[static_cast<std::size_t>(i)] << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

void standardize_features(Dataset& data) {
    const long n = data.size();
    const long d = data.dim();
    for (long j = 0; j < d; ++j) {
        double mean = 0.0;
        for (long i = 0; i < n; ++i) mean += data.features(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (long i = 0; i < n; ++i) {
            const double c = data.features(i, j) - mean;
            var += c * c;
        }
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (sd <= 0.0) continue;
        for (long i = 0; i < n; ++i) data.features(i, j) = (data.features(i, j) - mean) / sd;
    }
}

void append_bias_column(Dataset& data) {
    const long n = data.size();
    const long d = data.dim();
    Matrix wider(n, d + 1);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < d; ++j) wider(i, j) = data.features(i, j);
        wider(i, d) = 1.0;
    }
    data.features = std::move(wider);
}

std::vector<long> FoldPlan::train_indices(int fold) const {
    std::vector<long> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) out.push_back(static_cast<long>(i));
    return out;
}

std::vector<long> FoldPlan::test_indices(int fold) const {
    std::vector<long> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold) out.push_back(static_cast<long>(i));
    return out;
}

FoldPlan kfold_split(long n, int k, std::uint64_t seed) {
    if (k < 2 || k > n) throw DimensionMismatch("kfold_split: need 2 <= k <= n");
    std::vector<long> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    FoldPlan plan;
    plan.k = k;
    plan.assignment.resize(static_cast<std::size_t>(n));
    for (long pos = 0; pos < n; ++pos)
        plan.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] =
            static_cast<int>(pos % k);
    return plan;
}

Dataset subset(const Dataset& data, const std::vector<long>& rows) {
    Dataset out;
    const long d = data.dim();
    out.features = Matrix(static_cast<long>(rows.size()), d);
    out.labels.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (long j = 0; j < d; ++j) out.features(static_cast<long>(i), j) = data.features(rows[i], j);
        out.labels[i] = data.labels[static_cast<std::size_t>(rows[i])];
    }
    out.name = data.name;
    return out;
}

}  // namespace sdreg
