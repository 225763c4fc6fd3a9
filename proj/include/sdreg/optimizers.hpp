#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "sdreg/lbfgs.hpp"
#include "sdreg/linalg.hpp"
#include "sdreg/objective.hpp"
#include "sdreg/rng.hpp"

namespace sdreg {

enum class Algorithm { SdRegLbfgs, SdLbfgs, Sgd, Rsa, Saa, Adam, NoOp };

Algorithm algorithm_from_string(const std::string& name);
std::string algorithm_to_string(Algorithm a);

// State of the damped regularized stochastic L-BFGS iteration.
struct SqnState {
    Vector x;
    long k = 0;  // completed iterations
    long t = 0;  // completed averaging windows
    Vector interval_sum;
    Vector prev_avg;  // window average the next displacement is measured from
    LbfgsMemory memory;
    std::optional<SymMatrix> b_hat;
    std::optional<Cholesky> b_factor;  // cached factorization of b_hat
    Rng rng;

    SqnState(Vector x0, const HyperParams& hp, std::uint64_t seed);
};

// One stochastic iteration: gradient step (plain while t < 2, metric step
// afterwards), window bookkeeping, pair formation at window ends, and the
// rebuild of the dense curvature model.
void sdreg_lbfgs_step(SqnState& state, const StochasticObjective& obj, const HyperParams& hp);

struct SgdState {
    Vector x;
    long k = 0;
    Rng rng;

    SgdState(Vector x0, std::uint64_t seed) : x(std::move(x0)), rng(seed) {}
};

void sgd_step(SgdState& state, const StochasticObjective& obj, const HyperParams& hp);

// SGD plus an iterate average.  Saa keeps the uniform average of every
// iterate.  Rsa uses r/sqrt(k) steps and averages over two rolling windows
// aligned to powers of two, so the reported point is always an average over
// a suffix covering at least half the iterations so far.
struct AveragedSgdState {
    Vector x;
    Vector window_sum;
    long window_count = 0;
    Vector prev_window_sum;
    long prev_window_count = 0;
    long k = 0;
    long next_rollover = 0;  // 0 disables rollovers (uniform average)
    Rng rng;

    AveragedSgdState(Vector x0, std::uint64_t seed, bool suffix_windows);
};

void saa_step(AveragedSgdState& state, const StochasticObjective& obj, const HyperParams& hp);
void rsa_step(AveragedSgdState& state, const StochasticObjective& obj, const HyperParams& hp);

struct AdamState {
    Vector x;
    Vector m1;
    Vector m2;
    long k = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    Rng rng;

    AdamState(Vector x0, std::uint64_t seed);
};

void adam_step(AdamState& state, const StochasticObjective& obj, const HyperParams& hp);

// Uniform interface over all algorithms for the experiment harness.
class OptimizerDriver {
  public:
    virtual ~OptimizerDriver() = default;

    virtual void step(const StochasticObjective& obj) = 0;
    // Current iterate.
    virtual const Vector& iterate() const = 0;
    // Point to evaluate: the iterate, or the maintained average for the
    // averaging algorithms.
    virtual Vector solution() const = 0;

    static std::unique_ptr<OptimizerDriver> create(Algorithm algo, Vector x0,
                                                   const HyperParams& hp, std::uint64_t seed);
};

}  // namespace sdreg
