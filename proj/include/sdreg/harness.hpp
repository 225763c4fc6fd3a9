#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sdreg/config.hpp"
#include "sdreg/dataset.hpp"

namespace sdreg {

// Outcome of one (axis point, algorithm, fold, run) cell.
struct ResultRecord {
    int axis_index = 0;
    int batch_size = 0;
    int memory = 0;
    double gamma = 0.0;
    Algorithm algorithm = Algorithm::Sgd;
    int fold = 0;
    int run = 0;
    bool ok = true;
    std::string error;
    double nog = 0.0;  // on the training split, full data
    double acc = 0.0;  // on the held-out split
    double wall_ms = 0.0;
    // (window index, training NOG) samples, filled only when tracing is on.
    std::vector<std::pair<long, double>> nog_trace;
};

struct ExperimentResult {
    std::vector<ResultRecord> records;
    // key = value lines describing the run, replayed into every output file.
    std::vector<std::string> metadata;
};

// Runs every cell of the sweep deterministically: cell seeds depend only on
// (master_seed, axis point, fold, run), so algorithms are compared on
// identical initial points and batch noise.  Optimizer failures are
// recorded in the cell instead of aborting the sweep.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes records.tsv (flat table), summary.tsv (group means and standard
// deviations), one two-column series file per swept axis and algorithm,
// and trace.tsv when tracing was enabled.
void emit_results(const ExperimentResult& result, const ExperimentConfig& config,
                  const std::string& out_dir);

// Pairs two record tables by (axis, fold, run) and runs both location tests
// on the paired accuracy values.  Used by the stats CLI subcommand.
struct PairedStats {
    int pairs = 0;
    double sign_log10_p = 0.0;
    double wilcoxon_log10_p = 0.0;
};

PairedStats paired_stats_from_files(const std::string& file_a, const std::string& file_b,
                                    const std::string& algo_a = "", const std::string& algo_b = "",
                                    const std::string& metric = "acc");

}  // namespace sdreg
