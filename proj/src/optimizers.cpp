#include "sdreg/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sdreg/dataset.hpp"
#include "sdreg/errors.hpp"

namespace sdreg {

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "sdreg_lbfgs") return Algorithm::SdRegLbfgs;
    if (name == "sdlbfgs") return Algorithm::SdLbfgs;
    if (name == "sgd") return Algorithm::Sgd;
    if (name == "rsa") return Algorithm::Rsa;
    if (name == "saa") return Algorithm::Saa;
    if (name == "adam") return Algorithm::Adam;
    if (name == "noop") return Algorithm::NoOp;
    throw ConfigError("unknown algorithm '" + name + "'");
}

std::string algorithm_to_string(Algorithm a) {
    switch (a) {
        case Algorithm::SdRegLbfgs: return "sdreg_lbfgs";
        case Algorithm::SdLbfgs: return "sdlbfgs";
        case Algorithm::Sgd: return "sgd";
        case Algorithm::Rsa: return "rsa";
        case Algorithm::Saa: return "saa";
        case Algorithm::Adam: return "adam";
        case Algorithm::NoOp: return "noop";
    }
    throw ConfigError("unknown algorithm enum value");
}

SqnState::SqnState(Vector x0, const HyperParams& hp, std::uint64_t seed)
    : x(std::move(x0)),
      interval_sum(x.size(), 0.0),
      prev_avg(x),
      memory(hp.memory),
      rng(seed) {}

namespace {

Vector sampled_gradient(const Vector& x, const StochasticObjective& obj, const HyperParams& hp,
                        Rng& rng) {
    const long n = obj.sample_count();
    const int m = static_cast<int>(std::min<long>(hp.batch_size, n));
    Batch batch = sample_batch(n, m, rng);
    Vector g = obj.stochastic_grad(x, batch);
    if (!all_finite(g)) throw NonFinite("stochastic gradient has non-finite entries");
    return g;
}

}  // namespace

void sdreg_lbfgs_step(SqnState& state, const StochasticObjective& obj, const HyperParams& hp) {
    Vector g = sampled_gradient(state.x, obj, hp, state.rng);
    const double eta = step_size(state.k + 1, hp.step);

    axpy(1.0, state.x, state.interval_sum);

    if (state.t < 2 || !state.b_factor) {
        axpy(-eta, g, state.x);
    } else {
        Vector direction = state.b_factor->solve(g);
        if (dot(g, direction) < 0.0)
            throw InvariantViolation("sdreg_lbfgs_step: non-descent direction");
        axpy(-eta, direction, state.x);
    }
    state.k += 1;

    if (state.k % hp.interval != 0) return;

    // window closed: form the displacement between consecutive window
    // averages and the gradient difference on one shared fresh batch
    Vector avg = scaled(state.interval_sum, 1.0 / static_cast<double>(hp.interval));
    Vector s = subtract(avg, state.prev_avg);
    const long n = obj.sample_count();
    const int m = static_cast<int>(std::min<long>(hp.batch_size, n));
    Batch pair_batch = sample_batch(n, m, state.rng);
    Vector y = subtract(obj.stochastic_grad(avg, pair_batch),
                        obj.stochastic_grad(state.prev_avg, pair_batch));

    if (norm(s) > 1e-14 * (1.0 + norm(avg)) && all_finite(s) && all_finite(y)) {
        const double tau = initial_scaling(s, y, hp);
        state.memory.push(CorrectionPair{std::move(s), std::move(y), tau});
    }
    state.t += 1;
    state.prev_avg = std::move(avg);
    std::fill(state.interval_sum.begin(), state.interval_sum.end(), 0.0);

    if (state.t > 1 && !state.memory.empty()) {
        const double tau_t = state.memory.newest().tau_next;
        state.b_hat = build_hessian_approx(state.memory, tau_t, hp);
        state.b_factor = cholesky(*state.b_hat);
    }
}

void sgd_step(SgdState& state, const StochasticObjective& obj, const HyperParams& hp) {
    Vector g = sampled_gradient(state.x, obj, hp, state.rng);
    axpy(-step_size(state.k + 1, hp.step), g, state.x);
    state.k += 1;
}

AveragedSgdState::AveragedSgdState(Vector x0, std::uint64_t seed, bool suffix_windows)
    : x(std::move(x0)),
      window_sum(x.size(), 0.0),
      prev_window_sum(x.size(), 0.0),
      next_rollover(suffix_windows ? 1 : 0),
      rng(seed) {}

namespace {

void accumulate_average(AveragedSgdState& state) {
    axpy(1.0, state.x, state.window_sum);
    state.window_count += 1;
    if (state.next_rollover > 0 && state.k == state.next_rollover) {
        state.prev_window_sum = state.window_sum;
        state.prev_window_count = state.window_count;
        std::fill(state.window_sum.begin(), state.window_sum.end(), 0.0);
        state.window_count = 0;
        state.next_rollover *= 2;
    }
}

Vector averaged_solution(const AveragedSgdState& state) {
    const long count = state.window_count + state.prev_window_count;
    if (count == 0) return state.x;
    Vector out = state.window_sum;
    axpy(1.0, state.prev_window_sum, out);
    return scaled(out, 1.0 / static_cast<double>(count));
}

}  // namespace

void saa_step(AveragedSgdState& state, const StochasticObjective& obj, const HyperParams& hp) {
    Vector g = sampled_gradient(state.x, obj, hp, state.rng);
    axpy(-step_size(state.k + 1, hp.step), g, state.x);
    state.k += 1;
    accumulate_average(state);
}

void rsa_step(AveragedSgdState& state, const StochasticObjective& obj, const HyperParams& hp) {
    Vector g = sampled_gradient(state.x, obj, hp, state.rng);
    double eta;
    if (hp.step.kind == StepRule::Kind::RoverK) {
        eta = hp.step.r / std::sqrt(static_cast<double>(state.k + 1));
    } else {
        eta = step_size(state.k + 1, hp.step);
    }
    axpy(-eta, g, state.x);
    state.k += 1;
    accumulate_average(state);
}

AdamState::AdamState(Vector x0, std::uint64_t seed)
    : x(std::move(x0)), m1(x.size(), 0.0), m2(x.size(), 0.0), rng(seed) {}

void adam_step(AdamState& state, const StochasticObjective& obj, const HyperParams& hp) {
    Vector g = sampled_gradient(state.x, obj, hp, state.rng);
    state.k += 1;
    const double alpha = step_size(state.k, hp.step);
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.k));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.k));
    for (std::size_t i = 0; i < state.x.size(); ++i) {
        state.m1[i] = state.beta1 * state.m1[i] + (1.0 - state.beta1) * g[i];
        state.m2[i] = state.beta2 * state.m2[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double mhat = state.m1[i] / c1;
        const double vhat = state.m2[i] / c2;
        state.x[i] -= alpha * mhat / (std::sqrt(vhat) + state.eps);
    }
}

namespace {

class SqnDriver : public OptimizerDriver {
  public:
    SqnDriver(Vector x0, HyperParams hp, std::uint64_t seed)
        : hp_(std::move(hp)), state_(std::move(x0), hp_, seed) {}

    void step(const StochasticObjective& obj) override { sdreg_lbfgs_step(state_, obj, hp_); }
    const Vector& iterate() const override { return state_.x; }
    Vector solution() const override { return state_.x; }

  private:
    HyperParams hp_;
    SqnState state_;
};

class SgdDriver : public OptimizerDriver {
  public:
    SgdDriver(Vector x0, HyperParams hp, std::uint64_t seed)
        : hp_(std::move(hp)), state_(std::move(x0), seed) {}

    void step(const StochasticObjective& obj) override { sgd_step(state_, obj, hp_); }
    const Vector& iterate() const override { return state_.x; }
    Vector solution() const override { return state_.x; }

  private:
    HyperParams hp_;
    SgdState state_;
};

class AveragedDriver : public OptimizerDriver {
  public:
    AveragedDriver(Vector x0, HyperParams hp, std::uint64_t seed, bool sqrt_steps)
        : hp_(std::move(hp)), state_(std::move(x0), seed, sqrt_steps), sqrt_steps_(sqrt_steps) {}

    void step(const StochasticObjective& obj) override {
        if (sqrt_steps_) {
            rsa_step(state_, obj, hp_);
        } else {
            saa_step(state_, obj, hp_);
        }
    }
    const Vector& iterate() const override { return state_.x; }
    Vector solution() const override { return averaged_solution(state_); }

  private:
    HyperParams hp_;
    AveragedSgdState state_;
    bool sqrt_steps_;
};

class AdamDriver : public OptimizerDriver {
  public:
    AdamDriver(Vector x0, HyperParams hp, std::uint64_t seed)
        : hp_(std::move(hp)), state_(std::move(x0), seed) {}

    void step(const StochasticObjective& obj) override { adam_step(state_, obj, hp_); }
    const Vector& iterate() const override { return state_.x; }
    Vector solution() const override { return state_.x; }

  private:
    HyperParams hp_;
    AdamState state_;
};

class NoOpDriver : public OptimizerDriver {
  public:
    explicit NoOpDriver(Vector x0) : x_(std::move(x0)) {}

    void step(const StochasticObjective&) override {}
    const Vector& iterate() const override { return x_; }
    Vector solution() const override { return x_; }

  private:
    Vector x_;
};

}  // namespace

std::unique_ptr<OptimizerDriver> OptimizerDriver::create(Algorithm algo, Vector x0,
                                                         const HyperParams& hp,
                                                         std::uint64_t seed) {
    hp.validate();
    switch (algo) {
        case Algorithm::SdRegLbfgs:
            return std::make_unique<SqnDriver>(std::move(x0), hp, seed);
        case Algorithm::SdLbfgs: {
            // the undamped-floor variant: no spectral floor, no shift
            HyperParams plain = hp;
            plain.gamma = 0.0;
            plain.delta = 0.0;
            return std::make_unique<SqnDriver>(std::move(x0), plain, seed);
        }
        case Algorithm::Sgd:
            return std::make_unique<SgdDriver>(std::move(x0), hp, seed);
        case Algorithm::Rsa:
            return std::make_unique<AveragedDriver>(std::move(x0), hp, seed, true);
        case Algorithm::Saa:
            return std::make_unique<AveragedDriver>(std::move(x0), hp, seed, false);
        case Algorithm::Adam:
            return std::make_unique<AdamDriver>(std::move(x0), hp, seed);
        case Algorithm::NoOp:
            return std::make_unique<NoOpDriver>(std::move(x0));
    }
    throw ConfigError("unknown algorithm enum value");
}

}  // namespace sdreg
