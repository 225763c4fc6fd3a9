#include "sdreg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "sdreg/errors.hpp"

namespace sdreg {

ProblemKind problem_from_string(const std::string& name) {
    if (name == "lr") return ProblemKind::Lr;
    if (name == "blr") return ProblemKind::Blr;
    throw ConfigError("unknown problem '" + name + "' (expected lr or blr)");
}

std::string problem_to_string(ProblemKind p) {
    return p == ProblemKind::Lr ? "lr" : "blr";
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trimmed(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse number '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse integer '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': cannot parse boolean '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.algorithms.clear();
    std::set<std::string> seen;
    std::stringstream stream(text);
    std::string line;
    long line_no = 0;

    while (std::getline(stream, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trimmed(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        if (!seen.insert(key).second)
            throw ConfigError("duplicate key '" + key + "'");

        if (key == "problem") {
            cfg.problem = problem_from_string(value);
        } else if (key == "algorithms") {
            for (const std::string& name : split_list(value))
                cfg.algorithms.push_back(algorithm_from_string(name));
        } else if (key == "dataset") {
            if (value == "synth") {
                cfg.dataset.kind = DatasetSpec::Kind::Synthetic;
            } else {
                cfg.dataset.kind = DatasetSpec::Kind::File;
                cfg.dataset.path = value;
            }
        } else if (key == "synth_n") {
            cfg.dataset.synth_n = parse_long(key, value);
        } else if (key == "synth_d") {
            cfg.dataset.synth_d = static_cast<int>(parse_long(key, value));
        } else if (key == "synth_seed") {
            if (value == "auto") {
                cfg.dataset.synth_seed_auto = true;
            } else {
                cfg.dataset.synth_seed_auto = false;
                cfg.dataset.synth_seed = static_cast<std::uint64_t>(parse_long(key, value));
            }
        } else if (key == "label_column") {
            cfg.dataset.load.label_column = static_cast<int>(parse_long(key, value));
        } else if (key == "positive_label") {
            cfg.dataset.load.positive_label = value;
        } else if (key == "delimiter") {
            if (value == "tab") {
                cfg.dataset.load.delimiter = '\t';
            } else if (value.size() == 1) {
                cfg.dataset.load.delimiter = value[0];
            } else {
                throw ConfigError("key 'delimiter': expected a single character or 'tab'");
            }
        } else if (key == "has_header") {
            cfg.dataset.load.has_header = parse_bool(key, value);
        } else if (key == "standardize") {
            cfg.dataset.load.standardize = parse_bool(key, value);
        } else if (key == "add_bias") {
            cfg.dataset.load.add_bias = parse_bool(key, value);
        } else if (key == "batch_sizes") {
            cfg.batch_sizes.clear();
            for (const std::string& v : split_list(value))
                cfg.batch_sizes.push_back(static_cast<int>(parse_long(key, v)));
        } else if (key == "memory_sizes") {
            cfg.memory_sizes.clear();
            for (const std::string& v : split_list(value))
                cfg.memory_sizes.push_back(static_cast<int>(parse_long(key, v)));
        } else if (key == "gammas") {
            cfg.gammas.clear();
            for (const std::string& v : split_list(value))
                cfg.gammas.push_back(parse_double(key, v));
        } else if (key == "delta") {
            if (value == "auto") {
                cfg.delta_auto = true;
            } else {
                cfg.delta_auto = false;
                cfg.delta = parse_double(key, value);
            }
        } else if (key == "beta") {
            cfg.beta = parse_double(key, value);
        } else if (key == "interval") {
            cfg.interval = static_cast<int>(parse_long(key, value));
        } else if (key == "step_rule") {
            if (value == "roverk") {
                cfg.step_kind = StepRule::Kind::RoverK;
            } else if (value == "constant") {
                cfg.step_kind = StepRule::Kind::Constant;
            } else if (value == "analytic") {
                cfg.step_kind = StepRule::Kind::Analytic;
            } else {
                throw ConfigError("key 'step_rule': expected roverk, constant, or analytic");
            }
        } else if (key == "step_r") {
            cfg.step_r = parse_double(key, value);
        } else if (key == "step_alpha") {
            cfg.step_alpha = parse_double(key, value);
        } else if (key == "step_eta0") {
            cfg.step_eta0 = parse_double(key, value);
        } else if (key == "step_upsilon") {
            cfg.step_upsilon = parse_double(key, value);
        } else if (key == "step_rho") {
            if (value == "auto") {
                cfg.step_rho_auto = true;
            } else {
                cfg.step_rho_auto = false;
                cfg.step_rho = parse_double(key, value);
            }
        } else if (key == "monte_carlo_runs") {
            cfg.monte_carlo_runs = static_cast<int>(parse_long(key, value));
        } else if (key == "folds") {
            cfg.folds = static_cast<int>(parse_long(key, value));
        } else if (key == "iterations") {
            cfg.iterations = value == "auto" ? 0 : parse_long(key, value);
        } else if (key == "epochs") {
            cfg.epochs = static_cast<int>(parse_long(key, value));
        } else if (key == "master_seed") {
            cfg.master_seed = static_cast<std::uint64_t>(parse_long(key, value));
        } else if (key == "init") {
            if (value == "gauss") {
                cfg.init_zero = false;
            } else if (value == "zero") {
                cfg.init_zero = true;
            } else {
                throw ConfigError("key 'init': expected gauss or zero");
            }
        } else if (key == "s0_scale") {
            cfg.s0_scale = parse_double(key, value);
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "emit_timings") {
            cfg.emit_timings = parse_bool(key, value);
        } else if (key == "trace_nog") {
            cfg.trace_nog = parse_bool(key, value);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_long(key, value));
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    if (cfg.algorithms.empty())
        throw ConfigError("config must name at least one algorithm");
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void ExperimentConfig::validate() const {
    if (algorithms.empty()) throw ConfigError("no algorithms configured");
    if (batch_sizes.empty() || memory_sizes.empty() || gammas.empty())
        throw ConfigError("sweep axes must be non-empty");
    for (int m : batch_sizes)
        if (m < 1) throw ConfigError("batch sizes must be >= 1");
    for (int mem : memory_sizes)
        if (mem < 1) throw ConfigError("memory sizes must be >= 1");
    for (double g : gammas)
        if (g < 0.0) throw ConfigError("gamma must be >= 0");
    if (!delta_auto && delta < 0.0) throw ConfigError("delta must be >= 0");
    if (beta <= 0.0) throw ConfigError("beta must be > 0");
    if (interval < 1) throw ConfigError("interval must be >= 1");
    if (monte_carlo_runs < 1) throw ConfigError("monte_carlo_runs must be >= 1");
    if (folds < 2) throw ConfigError("folds must be >= 2");
    if (iterations < 0) throw ConfigError("iterations must be >= 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (s0_scale <= 0.0) throw ConfigError("s0_scale must be > 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (step_kind == StepRule::Kind::Analytic &&
        !(step_upsilon > 0.5 && step_upsilon < 1.0))
        throw ConfigError("step_upsilon must lie in (0.5, 1)");
    if (dataset.kind == DatasetSpec::Kind::Synthetic) {
        if (dataset.synth_n < folds) throw ConfigError("synth_n must be >= folds");
        if (dataset.synth_d < 1) throw ConfigError("synth_d must be >= 1");
    } else if (dataset.path.empty()) {
        throw ConfigError("dataset file path is empty");
    }
}

}  // namespace sdreg
