#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdreg/dataset.hpp"
#include "sdreg/lbfgs.hpp"
#include "sdreg/optimizers.hpp"

namespace sdreg {

enum class ProblemKind { Lr, Blr };

ProblemKind problem_from_string(const std::string& name);
std::string problem_to_string(ProblemKind p);

struct DatasetSpec {
    enum class Kind { Synthetic, File };

    Kind kind = Kind::Synthetic;
    long synth_n = 1000;
    int synth_d = 10;
    bool synth_seed_auto = true;
    std::uint64_t synth_seed = 0;
    std::string path;
    LoadOptions load;
};

// Full description of one experiment: problem, algorithms, data source,
// sweep axes, optimizer settings, and output options.  Parsed from a flat
// key=value file; unknown keys are an error.
struct ExperimentConfig {
    ProblemKind problem = ProblemKind::Lr;
    std::vector<Algorithm> algorithms;
    DatasetSpec dataset;

    // Sweep axes; the cross product defines the axis points.
    std::vector<int> batch_sizes{20};
    std::vector<int> memory_sizes{10};
    std::vector<double> gammas{1e-4};

    bool delta_auto = true;  // delta = 1.25 * gamma + 0.01
    double delta = 0.0;
    double beta = 1.0;
    int interval = 10;

    StepRule::Kind step_kind = StepRule::Kind::RoverK;
    double step_r = 7.0;
    double step_alpha = 1e-3;
    double step_eta0 = 1.0;
    double step_upsilon = 0.75;
    bool step_rho_auto = true;  // curvature bound estimated from the data
    double step_rho = 1.0;

    int monte_carlo_runs = 20;
    int folds = 5;
    long iterations = 0;  // 0: epochs * ceil(N_train / m)
    int epochs = 20;
    std::uint64_t master_seed = 1;
    bool init_zero = false;  // default init draws from a standard normal
    double s0_scale = 1.0;

    std::string out_dir = "results";
    bool emit_timings = false;
    bool trace_nog = false;
    int threads = 1;

    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace sdreg
