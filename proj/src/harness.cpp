#include "sdreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "sdreg/errors.hpp"
#include "sdreg/metrics.hpp"
#include "sdreg/stats.hpp"
#include "sdreg/vbi.hpp"

namespace sdreg {

namespace {

// Seed tags for the streams that must not collide with cell seeds.
constexpr std::uint64_t kFoldTag = 0xF01DF01DULL;
constexpr std::uint64_t kSynthTag = 0xDA7ADA7AULL;

struct AxisPoint {
    int index = 0;
    int batch = 0;
    int memory = 0;
    double gamma = 0.0;
    double delta = 0.0;
};

struct CellTask {
    AxisPoint axis;
    Algorithm algorithm = Algorithm::Sgd;
    int fold = 0;
    int run = 0;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

double largest_row_curvature(const Dataset& data) {
    double best = 0.0;
    for (long i = 0; i < data.size(); ++i) {
        const double* x = data.features.row(i);
        double sq = 0.0;
        for (int j = 0; j < data.dim(); ++j) sq += x[j] * x[j];
        best = std::max(best, 0.25 * sq);
    }
    return best;
}

StepRule make_step_rule(const ExperimentConfig& cfg, const AxisPoint& ax, double rho) {
    switch (cfg.step_kind) {
        case StepRule::Kind::RoverK:
            return StepRule::rover_k(cfg.step_r);
        case StepRule::Kind::Constant:
            return StepRule::constant(cfg.step_alpha);
        case StepRule::Kind::Analytic: {
            const double qu = spectrum_upper_bound(rho, ax.gamma, ax.delta, cfg.beta, ax.memory);
            const double ql = spectrum_lower_bound(rho, ax.gamma, ax.delta, cfg.beta, ax.memory);
            StepRule rule = StepRule::analytic(cfg.step_eta0, cfg.step_upsilon, qu, ql, rho);
            return rule;
        }
    }
    throw ConfigError("unknown step rule");
}

ResultRecord run_cell(const ExperimentConfig& cfg, const CellTask& task, const Dataset& train,
                      const Dataset& test, double rho) {
    ResultRecord rec;
    rec.axis_index = task.axis.index;
    rec.batch_size = task.axis.batch;
    rec.memory = task.axis.memory;
    rec.gamma = task.axis.gamma;
    rec.algorithm = task.algorithm;
    rec.fold = task.fold;
    rec.run = task.run;

    const auto started = std::chrono::steady_clock::now();
    try {
        const int d = train.dim();

        std::unique_ptr<StochasticObjective> obj;
        BayesianLogisticRegression* blr = nullptr;
        if (cfg.problem == ProblemKind::Blr) {
            SymMatrix s0(d);
            s0.add_diagonal(cfg.s0_scale);
            auto owned = std::make_unique<BayesianLogisticRegression>(train, std::move(s0));
            blr = owned.get();
            obj = std::move(owned);
        } else {
            obj = std::make_unique<LogisticRegression>(train);
        }

        HyperParams hp;
        hp.gamma = task.axis.gamma;
        hp.delta = task.axis.delta;
        hp.beta = cfg.beta;
        hp.memory = task.axis.memory;
        hp.interval = cfg.interval;
        hp.batch_size = task.axis.batch;
        hp.step = make_step_rule(cfg, task.axis, rho);

        const std::uint64_t cell = derive_seed(
            cfg.master_seed, static_cast<std::uint64_t>(task.axis.index),
            static_cast<std::uint64_t>(task.fold), static_cast<std::uint64_t>(task.run));

        // All algorithms in a cell share the init stream and the driver seed,
        // so paired comparisons see the same starting point and batch noise.
        Vector x0(static_cast<std::size_t>(d), 0.0);
        if (!cfg.init_zero) {
            Rng init_rng(derive_seed(cell, 1));
            for (double& v : x0) v = init_rng.normal();
        }

        auto driver = OptimizerDriver::create(task.algorithm, x0, hp, derive_seed(cell, 2));
        if (blr) blr->refresh_covariance(x0);

        long iters = cfg.iterations;
        if (iters == 0) {
            const long per_epoch = (train.size() + hp.batch_size - 1) / hp.batch_size;
            iters = static_cast<long>(cfg.epochs) * per_epoch;
        }

        for (long k = 1; k <= iters; ++k) {
            driver->step(*obj);
            if (k % cfg.interval != 0) continue;
            if (blr) blr->refresh_covariance(driver->iterate());
            if (cfg.trace_nog) {
                const Vector sol = driver->solution();
                const double nog = blr ? compute_nog_blr(blr->params(sol), train)
                                       : compute_nog_lr(sol, train);
                rec.nog_trace.emplace_back(k / cfg.interval, nog);
            }
        }

        const Vector sol = driver->solution();
        if (blr) {
            blr->refresh_covariance(sol);
            rec.nog = compute_nog_blr(blr->params(sol), train);
        } else {
            rec.nog = compute_nog_lr(sol, train);
        }
        rec.acc = compute_acc(sol, test);
        rec.ok = true;
    } catch (const std::exception& ex) {
        rec.ok = false;
        rec.error = ex.what();
        rec.nog = std::nan("");
        rec.acc = std::nan("");
    }
    const auto finished = std::chrono::steady_clock::now();
    rec.wall_ms = std::chrono::duration<double, std::milli>(finished - started).count();
    return rec;
}

std::string sanitize_field(std::string s) {
    for (char& c : s)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();

    Dataset base;
    if (config.dataset.kind == DatasetSpec::Kind::Synthetic) {
        const std::uint64_t seed = config.dataset.synth_seed_auto
                                       ? derive_seed(config.master_seed, kSynthTag)
                                       : config.dataset.synth_seed;
        base = synth_generate(config.dataset.synth_n, config.dataset.synth_d, seed).data;
        if (config.dataset.load.standardize) standardize_features(base);
        if (config.dataset.load.add_bias) append_bias_column(base);
    } else {
        base = load_delimited(config.dataset.path, config.dataset.load);
    }
    base.validate();

    const FoldPlan plan = kfold_split(base.size(), config.folds,
                                      derive_seed(config.master_seed, kFoldTag));
    std::vector<Dataset> trains;
    std::vector<Dataset> tests;
    trains.reserve(static_cast<std::size_t>(config.folds));
    tests.reserve(static_cast<std::size_t>(config.folds));
    for (int f = 0; f < config.folds; ++f) {
        trains.push_back(subset(base, plan.train_indices(f)));
        tests.push_back(subset(base, plan.test_indices(f)));
    }

    // The analytic schedule needs a curvature bound; estimate it once from
    // the full data so every fold sees the same rule.
    double rho = config.step_rho;
    if (config.step_rho_auto) rho = std::max(largest_row_curvature(base), 1e-12);

    std::vector<AxisPoint> axes;
    for (int m : config.batch_sizes) {
        for (int mem : config.memory_sizes) {
            for (double g : config.gammas) {
                AxisPoint ax;
                ax.index = static_cast<int>(axes.size());
                ax.batch = m;
                ax.memory = mem;
                ax.gamma = g;
                ax.delta = config.delta_auto ? 1.25 * g + 0.01 : config.delta;
                axes.push_back(ax);
            }
        }
    }

    std::vector<CellTask> tasks;
    for (const AxisPoint& ax : axes)
        for (Algorithm algo : config.algorithms)
            for (int f = 0; f < config.folds; ++f)
                for (int r = 0; r < config.monte_carlo_runs; ++r)
                    tasks.push_back(CellTask{ax, algo, f, r});

    ExperimentResult result;
    result.records.resize(tasks.size());

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) break;
            const CellTask& t = tasks[i];
            result.records[i] =
                run_cell(config, t, trains[static_cast<std::size_t>(t.fold)],
                         tests[static_cast<std::size_t>(t.fold)], rho);
        }
    };
    if (config.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < config.threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    result.metadata.push_back("problem = " + problem_to_string(config.problem));
    result.metadata.push_back("dataset = " + base.name);
    result.metadata.push_back("rows = " + std::to_string(base.size()));
    result.metadata.push_back("dim = " + std::to_string(base.dim()));
    {
        std::string names;
        for (Algorithm a : config.algorithms) {
            if (!names.empty()) names += ",";
            names += algorithm_to_string(a);
        }
        result.metadata.push_back("algorithms = " + names);
    }
    result.metadata.push_back("folds = " + std::to_string(config.folds));
    result.metadata.push_back("runs = " + std::to_string(config.monte_carlo_runs));
    result.metadata.push_back("interval = " + std::to_string(config.interval));
    result.metadata.push_back("beta = " + format_double(config.beta));
    result.metadata.push_back(
        "iterations = " + (config.iterations > 0
                               ? std::to_string(config.iterations)
                               : "auto(epochs=" + std::to_string(config.epochs) + ")"));
    result.metadata.push_back("master_seed = " + std::to_string(config.master_seed));
    switch (config.step_kind) {
        case StepRule::Kind::RoverK:
            result.metadata.push_back("step = " + format_double(config.step_r) + "/k");
            break;
        case StepRule::Kind::Constant:
            result.metadata.push_back("step = constant " + format_double(config.step_alpha));
            break;
        case StepRule::Kind::Analytic:
            result.metadata.push_back("step = analytic schedule, curvature bound " +
                                      format_double(rho));
            break;
    }
    if (config.problem == ProblemKind::Blr)
        result.metadata.push_back("s0_scale = " + format_double(config.s0_scale));
    result.metadata.push_back(std::string("init = ") + (config.init_zero ? "zero" : "gauss"));
    return result;
}

namespace {

struct GroupKey {
    int axis;
    std::string algo;

    bool operator<(const GroupKey& o) const {
        return axis != o.axis ? axis < o.axis : algo < o.algo;
    }
};

struct GroupStats {
    int count = 0;
    int failures = 0;
    double nog_sum = 0.0, nog_sq = 0.0;
    double acc_sum = 0.0, acc_sq = 0.0;

    void add(const ResultRecord& r) {
        if (!r.ok) {
            ++failures;
            return;
        }
        ++count;
        nog_sum += r.nog;
        nog_sq += r.nog * r.nog;
        acc_sum += r.acc;
        acc_sq += r.acc * r.acc;
    }
    double mean(double sum) const { return count > 0 ? sum / count : std::nan(""); }
    double sd(double sum, double sq) const {
        if (count < 2) return std::nan("");
        const double m = sum / count;
        const double var = std::max(0.0, (sq - count * m * m) / (count - 1));
        return std::sqrt(var);
    }
};

void write_metadata(std::ofstream& out, const ExperimentResult& result) {
    for (const std::string& line : result.metadata) out << "# " << line << "\n";
}

}  // namespace

void emit_results(const ExperimentResult& result, const ExperimentConfig& config,
                  const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);

    {
        std::ofstream out(out_dir + "/records.tsv");
        if (!out) throw IoError("cannot write " + out_dir + "/records.tsv");
        write_metadata(out, result);
        out << "axis\tbatch\tmemory\tgamma\talgorithm\tfold\trun\tok\tnog\tacc";
        if (config.emit_timings) out << "\twall_ms";
        out << "\terror\n";
        for (const ResultRecord& r : result.records) {
            out << r.axis_index << '\t' << r.batch_size << '\t' << r.memory << '\t'
                << format_double(r.gamma) << '\t' << algorithm_to_string(r.algorithm) << '\t'
                << r.fold << '\t' << r.run << '\t' << (r.ok ? 1 : 0) << '\t'
                << format_double(r.nog) << '\t' << format_double(r.acc);
            if (config.emit_timings) out << '\t' << format_double(r.wall_ms);
            out << '\t' << (r.error.empty() ? "-" : sanitize_field(r.error)) << "\n";
        }
    }

    std::map<GroupKey, GroupStats> groups;
    std::map<int, const ResultRecord*> axis_sample;
    for (const ResultRecord& r : result.records) {
        groups[GroupKey{r.axis_index, algorithm_to_string(r.algorithm)}].add(r);
        axis_sample.emplace(r.axis_index, &r);
    }

    {
        std::ofstream out(out_dir + "/summary.tsv");
        if (!out) throw IoError("cannot write " + out_dir + "/summary.tsv");
        write_metadata(out, result);
        out << "axis\tbatch\tmemory\tgamma\talgorithm\tcount\tfailures\t"
               "nog_mean\tnog_sd\tacc_mean\tacc_sd\n";
        for (const auto& [key, g] : groups) {
            const ResultRecord* sample = axis_sample.at(key.axis);
            if (g.count == 0)
                out << "# warning: no successful records for axis=" << key.axis
                    << " algorithm=" << key.algo << "\n";
            out << key.axis << '\t' << sample->batch_size << '\t' << sample->memory << '\t'
                << format_double(sample->gamma) << '\t' << key.algo << '\t' << g.count << '\t'
                << g.failures << '\t' << format_double(g.mean(g.nog_sum)) << '\t'
                << format_double(g.sd(g.nog_sum, g.nog_sq)) << '\t'
                << format_double(g.mean(g.acc_sum)) << '\t'
                << format_double(g.sd(g.acc_sum, g.acc_sq)) << "\n";
        }
    }

    // Marginal series along every axis that actually sweeps, one file per
    // (axis, metric, algorithm) so the curves can be plotted directly.
    struct AxisView {
        std::string name;
        bool varies;
        std::function<double(const ResultRecord&)> value;
    };
    const std::vector<AxisView> views = {
        {"batch", config.batch_sizes.size() > 1,
         [](const ResultRecord& r) { return static_cast<double>(r.batch_size); }},
        {"memory", config.memory_sizes.size() > 1,
         [](const ResultRecord& r) { return static_cast<double>(r.memory); }},
        {"gamma", config.gammas.size() > 1, [](const ResultRecord& r) { return r.gamma; }},
    };
    for (const AxisView& view : views) {
        if (!view.varies) continue;
        for (Algorithm algo : config.algorithms) {
            for (const std::string metric : {"nog", "acc"}) {
                std::map<double, std::pair<double, long>> sums;
                for (const ResultRecord& r : result.records) {
                    if (r.algorithm != algo || !r.ok) continue;
                    auto& slot = sums[view.value(r)];
                    slot.first += metric == "nog" ? r.nog : r.acc;
                    slot.second += 1;
                }
                const std::string path = out_dir + "/series_" + view.name + "_" + metric + "_" +
                                         algorithm_to_string(algo) + ".tsv";
                std::ofstream out(path);
                if (!out) throw IoError("cannot write " + path);
                out << view.name << '\t' << metric << "_mean\n";
                for (const auto& [value, slot] : sums)
                    out << format_double(value) << '\t' << format_double(slot.first / slot.second)
                        << "\n";
            }
        }
    }

    bool any_trace = false;
    for (const ResultRecord& r : result.records)
        if (!r.nog_trace.empty()) any_trace = true;
    if (any_trace) {
        std::ofstream out(out_dir + "/trace.tsv");
        if (!out) throw IoError("cannot write " + out_dir + "/trace.tsv");
        write_metadata(out, result);
        out << "axis\talgorithm\tfold\trun\twindow\tnog\n";
        for (const ResultRecord& r : result.records)
            for (const auto& [window, nog] : r.nog_trace)
                out << r.axis_index << '\t' << algorithm_to_string(r.algorithm) << '\t' << r.fold
                    << '\t' << r.run << '\t' << window << '\t' << format_double(nog) << "\n";
    }
}

namespace {

struct RecordTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        throw MissingColumn("column '" + name + "' not found in record table");
    }
};

RecordTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    RecordTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, '\t')) fields.push_back(field);
        if (table.columns.empty())
            table.columns = fields;
        else
            table.rows.push_back(fields);
    }
    if (table.columns.empty()) throw ParseError("no header found in " + path, 1);
    return table;
}

std::map<std::string, double> keyed_metric(const RecordTable& table, const std::string& algo,
                                           const std::string& metric) {
    const int c_batch = table.column("batch");
    const int c_memory = table.column("memory");
    const int c_gamma = table.column("gamma");
    const int c_algo = table.column("algorithm");
    const int c_fold = table.column("fold");
    const int c_run = table.column("run");
    const int c_ok = table.column("ok");
    const int c_metric = table.column(metric);

    std::map<std::string, double> out;
    for (const auto& row : table.rows) {
        if (row[static_cast<std::size_t>(c_ok)] != "1") continue;
        if (!algo.empty() && row[static_cast<std::size_t>(c_algo)] != algo) continue;
        const std::string key = row[static_cast<std::size_t>(c_batch)] + "|" +
                                row[static_cast<std::size_t>(c_memory)] + "|" +
                                row[static_cast<std::size_t>(c_gamma)] + "|" +
                                row[static_cast<std::size_t>(c_fold)] + "|" +
                                row[static_cast<std::size_t>(c_run)];
        out[key] = std::stod(row[static_cast<std::size_t>(c_metric)]);
    }
    return out;
}

}  // namespace

PairedStats paired_stats_from_files(const std::string& file_a, const std::string& file_b,
                                    const std::string& algo_a, const std::string& algo_b,
                                    const std::string& metric) {
    const RecordTable ta = read_table(file_a);
    const RecordTable tb = read_table(file_b);
    const auto ma = keyed_metric(ta, algo_a, metric);
    const auto mb = keyed_metric(tb, algo_b, metric);

    std::vector<double> a, b;
    for (const auto& [key, value] : ma) {
        const auto it = mb.find(key);
        if (it == mb.end()) continue;
        a.push_back(value);
        b.push_back(it->second);
    }
    if (a.empty()) throw ConfigError("no common (axis, fold, run) cells between the two tables");

    PairedStats stats;
    stats.pairs = static_cast<int>(a.size());
    stats.sign_log10_p = sign_test(a, b);
    try {
        stats.wilcoxon_log10_p = wilcoxon_test(a, b);
    } catch (const AllTies&) {
        stats.wilcoxon_log10_p = 0.0;
    }
    return stats;
}

}  // namespace sdreg
