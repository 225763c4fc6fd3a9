#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdreg/linalg.hpp"
#include "sdreg/rng.hpp"

namespace sdreg {

// Binary classification data: N rows of d features plus 0/1 labels.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::string name;

    long size() const { return features.rows(); }
    int dim() const { return static_cast<int>(features.cols()); }
    void validate() const;
};

// Indices of the rows participating in one stochastic gradient evaluation.
struct Batch {
    std::vector<int> indices;

    int size() const { return static_cast<int>(indices.size()); }
};

Batch full_batch(long n);
Batch sample_batch(long n, int m, Rng& rng);

struct SynthResult {
    Dataset data;
    Vector theta_bar;
};

// Features uniform on [0,1]^d, labels 1 exactly when theta_bar'x > 0 for a
// single hidden theta_bar drawn uniformly from [-1,1]^d.
SynthResult synth_generate(long n, int d, std::uint64_t seed);

struct LoadOptions {
    char delimiter = ',';
    bool has_header = false;
    // -1 selects the last column.
    int label_column = -1;
    std::string positive_label = "1";
    bool standardize = false;
    bool add_bias = false;
};

Dataset load_delimited(const std::string& path, const LoadOptions& opts = {});
void save_delimited(const Dataset& data, const std::string& path, char delimiter = ',');

// Column-wise z-scoring in place; constant columns are left untouched.
void standardize_features(Dataset& data);
// Appends a constant 1.0 column.
void append_bias_column(Dataset& data);

// Round-robin assignment of a random permutation to k folds.
struct FoldPlan {
    int k = 0;
    std::vector<int> assignment;  // fold id per row

    std::vector<long> train_indices(int fold) const;
    std::vector<long> test_indices(int fold) const;
};

FoldPlan kfold_split(long n, int k, std::uint64_t seed);
Dataset subset(const Dataset& data, const std::vector<long>& rows);

}  // namespace sdreg
