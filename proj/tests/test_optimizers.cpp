#include <cmath>

#include <doctest.h>

#include "sdreg/dataset.hpp"
#include "sdreg/errors.hpp"
#include "sdreg/metrics.hpp"
#include "sdreg/objective.hpp"
#include "sdreg/optimizers.hpp"

using namespace sdreg;

namespace {

// f(x) = 0.5 |x|^2 with exact gradients regardless of the sampled batch.
class Quadratic : public StochasticObjective {
  public:
    explicit Quadratic(int d, long n = 8) : d_(d), n_(n) {}

    int dim() const override { return d_; }
    long sample_count() const override { return n_; }
    double loss(const Vector& x, const Batch&) const override { return 0.5 * dot(x, x); }
    using StochasticObjective::stochastic_grad;
    void stochastic_grad(const Vector& x, const Batch&, Vector& out) const override { out = x; }

  private:
    int d_;
    long n_;
};

HyperParams quadratic_params(double alpha) {
    HyperParams hp;
    hp.gamma = 1e-4;
    hp.delta = 1.25e-4 + 0.01;
    hp.beta = 1.0;
    hp.memory = 5;
    hp.interval = 4;
    hp.batch_size = 8;
    hp.step = StepRule::constant(alpha);
    return hp;
}

}  // namespace

TEST_CASE("algorithm names round trip") {
    for (const Algorithm a : {Algorithm::SdRegLbfgs, Algorithm::SdLbfgs, Algorithm::Sgd,
                              Algorithm::Rsa, Algorithm::Saa, Algorithm::Adam, Algorithm::NoOp})
        CHECK(algorithm_from_string(algorithm_to_string(a)) == a);
    CHECK_THROWS_AS((void)algorithm_from_string("nope"), ConfigError);
}

TEST_CASE("plain stochastic step on the quadratic") {
    const Quadratic obj(1);
    HyperParams hp = quadratic_params(0.5);
    SgdState state(Vector{2.0}, 1);
    sgd_step(state, obj, hp);
    CHECK(state.x[0] == doctest::Approx(1.0));
    CHECK(state.k == 1);
}

TEST_CASE("window bookkeeping forms pairs and builds the model") {
    const Quadratic obj(3);
    HyperParams hp = quadratic_params(0.2);
    hp.interval = 5;

    SqnState state(Vector{1.0, -2.0, 0.5}, hp, 3);
    for (int i = 0; i < 5; ++i) sdreg_lbfgs_step(state, obj, hp);
    CHECK(state.t == 1);
    CHECK(state.memory.size() == 1);  // first window average differs from x0
    CHECK_FALSE(state.b_hat.has_value());

    for (int i = 0; i < 5; ++i) sdreg_lbfgs_step(state, obj, hp);
    CHECK(state.t == 2);
    CHECK(state.memory.size() == 2);
    CHECK(state.b_hat.has_value());
    const auto [lo, hi] = sym_eig_extremes(*state.b_hat);
    CHECK(lo >= hp.gamma - 1e-10);

    // with a one-step window the very first displacement is zero and skipped
    HyperParams tight = quadratic_params(0.2);
    tight.interval = 1;
    SqnState short_state(Vector{1.0, 1.0, 1.0}, tight, 3);
    sdreg_lbfgs_step(short_state, obj, tight);
    CHECK(short_state.t == 1);
    CHECK(short_state.memory.empty());
}

TEST_CASE("curvature steps contract the quadratic") {
    const Quadratic obj(3);
    HyperParams hp = quadratic_params(0.3);

    SqnState state(Vector{2.0, -1.0, 1.5}, hp, 9);
    double prev = norm(state.x);
    for (int i = 0; i < 60; ++i) {
        sdreg_lbfgs_step(state, obj, hp);
        const double cur = norm(state.x);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(norm(state.x) < 1e-4);
}

TEST_CASE("full-batch logistic run cuts the gradient norm by an order of magnitude") {
    const Dataset data = synth_generate(30, 2, 11).data;
    LogisticRegression obj(data);

    HyperParams hp;
    hp.gamma = 1e-4;
    hp.delta = 1.25e-4 + 0.01;
    hp.beta = 1.0;
    hp.memory = 10;
    hp.interval = 10;
    hp.batch_size = 30;  // full batch: deterministic optimization
    hp.step = StepRule::rover_k(7.0);

    const Vector x0(2, 0.0);
    const double nog0 = compute_nog_lr(x0, data);
    SqnState state(x0, hp, 5);
    for (int i = 0; i < 200; ++i) sdreg_lbfgs_step(state, obj, hp);
    const double nog = compute_nog_lr(state.x, data);
    CHECK(nog <= nog0 / 10.0);
}

TEST_CASE("identical seeds reproduce identical trajectories") {
    const Dataset data = synth_generate(40, 3, 13).data;
    LogisticRegression obj(data);

    HyperParams hp;
    hp.gamma = 1e-4;
    hp.delta = 1.25e-4 + 0.01;
    hp.batch_size = 5;
    hp.interval = 5;
    hp.memory = 4;
    hp.step = StepRule::rover_k(7.0);

    SqnState a(Vector{0.1, 0.2, -0.3}, hp, 42);
    SqnState b(Vector{0.1, 0.2, -0.3}, hp, 42);
    for (int i = 0; i < 40; ++i) {
        sdreg_lbfgs_step(a, obj, hp);
        sdreg_lbfgs_step(b, obj, hp);
        REQUIRE(a.x == b.x);  // bit-exact
    }

    SqnState c(Vector{0.1, 0.2, -0.3}, hp, 43);
    for (int i = 0; i < 40; ++i) sdreg_lbfgs_step(c, obj, hp);
    CHECK(a.x != c.x);
}

TEST_CASE("undamped-floor driver equals the zeroed variant") {
    const Dataset data = synth_generate(40, 3, 29).data;
    LogisticRegression obj(data);

    HyperParams hp;
    hp.gamma = 1e-4;
    hp.delta = 1.25e-4 + 0.01;
    hp.batch_size = 5;
    hp.interval = 5;
    hp.memory = 4;
    hp.step = StepRule::rover_k(7.0);

    auto plain = OptimizerDriver::create(Algorithm::SdLbfgs, Vector(3, 0.0), hp, 7);

    HyperParams zeroed = hp;
    zeroed.gamma = 0.0;
    zeroed.delta = 0.0;
    auto manual = OptimizerDriver::create(Algorithm::SdRegLbfgs, Vector(3, 0.0), zeroed, 7);

    for (int i = 0; i < 60; ++i) {
        plain->step(obj);
        manual->step(obj);
        REQUIRE(plain->iterate() == manual->iterate());
    }
}

TEST_CASE("first moment-corrected step moves by alpha in each coordinate") {
    const Quadratic obj(2);
    HyperParams hp = quadratic_params(0.1);

    AdamState state(Vector{1.0, -2.0}, 1);
    adam_step(state, obj, hp);
    // bias correction makes the first step alpha * g / (|g| + eps)
    CHECK(state.x[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-6));
    CHECK(state.x[1] == doctest::Approx(-2.0 + 0.1).epsilon(1e-6));
}

TEST_CASE("uniform averaging reports the mean of all iterates") {
    const Quadratic obj(2);
    HyperParams hp = quadratic_params(0.25);

    auto driver = OptimizerDriver::create(Algorithm::Saa, Vector{4.0, -4.0}, hp, 11);
    std::vector<Vector> iterates;
    for (int i = 0; i < 13; ++i) {
        driver->step(obj);
        iterates.push_back(driver->iterate());
    }
    Vector mean(2, 0.0);
    for (const Vector& it : iterates) axpy(1.0 / 13.0, it, mean);
    const Vector sol = driver->solution();
    CHECK(sol[0] == doctest::Approx(mean[0]).epsilon(1e-14));
    CHECK(sol[1] == doctest::Approx(mean[1]).epsilon(1e-14));
}

TEST_CASE("suffix averaging reports the mean over the trailing windows") {
    const Quadratic obj(2);
    HyperParams hp = quadratic_params(0.25);
    hp.step = StepRule::rover_k(1.0);  // square-root schedule inside the driver

    auto driver = OptimizerDriver::create(Algorithm::Rsa, Vector{4.0, -4.0}, hp, 11);
    std::vector<Vector> iterates;
    for (int i = 0; i < 13; ++i) {
        driver->step(obj);
        iterates.push_back(driver->iterate());
    }
    // after 13 steps the live windows cover iterates 5..13 (1-based)
    Vector mean(2, 0.0);
    for (int k = 5; k <= 13; ++k) axpy(1.0 / 9.0, iterates[static_cast<std::size_t>(k - 1)], mean);
    Vector sol = driver->solution();
    CHECK(sol[0] == doctest::Approx(mean[0]).epsilon(1e-13));
    CHECK(sol[1] == doctest::Approx(mean[1]).epsilon(1e-13));

    // at a power-of-two count the suffix is exactly the trailing half
    for (int i = 13; i < 16; ++i) {
        driver->step(obj);
        iterates.push_back(driver->iterate());
    }
    mean.assign(2, 0.0);
    for (int k = 9; k <= 16; ++k) axpy(1.0 / 8.0, iterates[static_cast<std::size_t>(k - 1)], mean);
    sol = driver->solution();
    CHECK(sol[0] == doctest::Approx(mean[0]).epsilon(1e-13));
    CHECK(sol[1] == doctest::Approx(mean[1]).epsilon(1e-13));
}

TEST_CASE("square-root schedule drives the suffix steps") {
    const Quadratic obj(1);
    HyperParams hp = quadratic_params(0.0);
    hp.step = StepRule::rover_k(0.5);

    AveragedSgdState state(Vector{1.0}, 1, true);
    rsa_step(state, obj, hp);
    // x1 = x0 (1 - r / sqrt(1))
    CHECK(state.x[0] == doctest::Approx(0.5).epsilon(1e-15));
    rsa_step(state, obj, hp);
    // x2 = x1 (1 - r / sqrt(2))
    CHECK(state.x[0] == doctest::Approx(0.5 * (1.0 - 0.5 / std::sqrt(2.0))).epsilon(1e-15));
}

TEST_CASE("driver factory covers every algorithm deterministically") {
    const Dataset data = synth_generate(50, 3, 3).data;
    LogisticRegression obj(data);

    HyperParams hp;
    hp.gamma = 1e-4;
    hp.delta = 1.25e-4 + 0.01;
    hp.batch_size = 10;
    hp.interval = 5;
    hp.memory = 5;
    hp.step = StepRule::rover_k(7.0);

    for (const Algorithm algo : {Algorithm::SdRegLbfgs, Algorithm::SdLbfgs, Algorithm::Sgd,
                                 Algorithm::Rsa, Algorithm::Saa, Algorithm::Adam}) {
        CAPTURE(algorithm_to_string(algo));
        auto one = OptimizerDriver::create(algo, Vector(3, 0.1), hp, 123);
        auto two = OptimizerDriver::create(algo, Vector(3, 0.1), hp, 123);
        for (int i = 0; i < 30; ++i) {
            one->step(obj);
            two->step(obj);
        }
        REQUIRE(one->solution() == two->solution());
        CHECK(all_finite(one->solution()));
    }

    auto frozen = OptimizerDriver::create(Algorithm::NoOp, Vector{0.5, 0.5, 0.5}, hp, 1);
    frozen->step(obj);
    CHECK(frozen->solution() == Vector{0.5, 0.5, 0.5});

    HyperParams bad = hp;
    bad.batch_size = 0;
    CHECK_THROWS_AS((void)OptimizerDriver::create(Algorithm::Sgd, Vector(3, 0.0), bad, 1),
                    ConfigError);
}
