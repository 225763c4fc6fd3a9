// Command line front end: run experiments from a config file, sweep axis
// overrides, compare two result tables, or generate synthetic data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdreg/config.hpp"
#include "sdreg/dataset.hpp"
#include "sdreg/errors.hpp"
#include "sdreg/harness.hpp"
#include "sdreg/rng.hpp"

namespace {

void execute(const sdreg::ExperimentConfig& config, const std::string& out_dir) {
    const sdreg::ExperimentResult result = sdreg::run_experiment(config);
    sdreg::emit_results(result, config, out_dir);
    long failures = 0;
    for (const auto& rec : result.records)
        if (!rec.ok) ++failures;
    std::cout << "wrote " << result.records.size() << " records to " << out_dir;
    if (failures > 0) std::cout << " (" << failures << " failed cells)";
    std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic quasi-Newton experiment harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir_override;

    CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "key=value config file")->required();
    run->add_option("--out-dir", out_dir_override, "override the configured output directory");

    std::string sweep_config;
    std::string sweep_out;
    std::vector<int> sweep_batches;
    std::vector<int> sweep_memories;
    std::vector<double> sweep_gammas;
    CLI::App* sweep = app.add_subcommand("sweep", "run a config with overridden sweep axes");
    sweep->add_option("config", sweep_config, "key=value config file")->required();
    sweep->add_option("--batch-sizes", sweep_batches, "batch sizes to sweep");
    sweep->add_option("--memory-sizes", sweep_memories, "memory sizes to sweep");
    sweep->add_option("--gammas", sweep_gammas, "eigenvalue floors to sweep");
    sweep->add_option("--out-dir", sweep_out, "override the configured output directory");

    std::string stats_a, stats_b, stats_algo_a, stats_algo_b, stats_metric = "acc";
    CLI::App* stats = app.add_subcommand(
        "test-stats", "paired sign and signed-rank tests between two record tables");
    stats->add_option("table_a", stats_a, "records.tsv of the first method")->required();
    stats->add_option("table_b", stats_b, "records.tsv of the second method")->required();
    stats->add_option("--algo-a", stats_algo_a, "restrict the first table to one algorithm");
    stats->add_option("--algo-b", stats_algo_b, "restrict the second table to one algorithm");
    stats->add_option("--metric", stats_metric, "column to compare (default acc)");

    long gen_n = 1000;
    int gen_d = 10;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "synth.csv";
    CLI::App* gen = app.add_subcommand("gen-synth", "write a synthetic dataset to a csv file");
    gen->add_option("--n", gen_n, "rows");
    gen->add_option("--d", gen_d, "feature dimension");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output path (a .theta sidecar records the plane)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            sdreg::ExperimentConfig config = sdreg::parse_config_file(config_path);
            execute(config, out_dir_override.empty() ? config.out_dir : out_dir_override);
        } else if (sweep->parsed()) {
            sdreg::ExperimentConfig config = sdreg::parse_config_file(sweep_config);
            if (!sweep_batches.empty()) config.batch_sizes = sweep_batches;
            if (!sweep_memories.empty()) config.memory_sizes = sweep_memories;
            if (!sweep_gammas.empty()) config.gammas = sweep_gammas;
            config.validate();
            execute(config, sweep_out.empty() ? config.out_dir : sweep_out);
        } else if (stats->parsed()) {
            const sdreg::PairedStats result = sdreg::paired_stats_from_files(
                stats_a, stats_b, stats_algo_a, stats_algo_b, stats_metric);
            std::printf("pairs\t%d\n", result.pairs);
            std::printf("sign_log10_p\t%.6f\n", result.sign_log10_p);
            std::printf("wilcoxon_log10_p\t%.6f\n", result.wilcoxon_log10_p);
        } else if (gen->parsed()) {
            const sdreg::SynthResult synth = sdreg::synth_generate(gen_n, gen_d, gen_seed);
            sdreg::save_delimited(synth.data, gen_out);
            std::ofstream side(gen_out + ".theta");
            if (!side) throw sdreg::IoError("cannot write " + gen_out + ".theta");
            for (std::size_t i = 0; i < synth.theta_bar.size(); ++i)
                side << (i ? "," : "") << synth.theta_bar[i];
            side << "\n";
            std::cout << "wrote " << gen_out << " (" << gen_n << " x " << gen_d << ")\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
