#include "sdreg/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sdreg/errors.hpp"

namespace sdreg {

StepRule StepRule::rover_k(double r) {
    StepRule rule;
    rule.kind = Kind::RoverK;
    rule.r = r;
    return rule;
}

StepRule StepRule::constant(double alpha) {
    StepRule rule;
    rule.kind = Kind::Constant;
    rule.alpha = alpha;
    return rule;
}

StepRule StepRule::analytic(double eta0, double upsilon, double q_upper, double q_lower,
                            double lipschitz) {
    StepRule rule;
    rule.kind = Kind::Analytic;
    rule.eta0 = eta0;
    rule.upsilon = upsilon;
    rule.q_upper = q_upper;
    rule.q_lower = q_lower;
    rule.lipschitz = lipschitz;
    return rule;
}

void HyperParams::validate() const {
    if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
    if (delta < 0.0) throw ConfigError("delta must be >= 0");
    if (0.8 * delta < gamma)
        throw ConfigError("need 0.8 * delta >= gamma (got delta=" + std::to_string(delta) +
                          ", gamma=" + std::to_string(gamma) + ")");
    if (beta <= 0.0) throw ConfigError("beta must be > 0");
    if (memory < 1) throw ConfigError("memory must be >= 1");
    if (interval < 1) throw ConfigError("interval must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    switch (step.kind) {
        case StepRule::Kind::RoverK:
            if (step.r <= 0.0) throw ConfigError("step r must be > 0");
            break;
        case StepRule::Kind::Constant:
            if (step.alpha <= 0.0) throw ConfigError("step alpha must be > 0");
            break;
        case StepRule::Kind::Analytic:
            if (step.eta0 <= 0.0) throw ConfigError("step eta0 must be > 0");
            if (!(step.upsilon > 0.5 && step.upsilon < 1.0))
                throw ConfigError("step upsilon must lie in (0.5, 1)");
            if (step.q_upper <= 0.0 || step.q_lower <= 0.0 || step.lipschitz <= 0.0)
                throw ConfigError("analytic schedule constants must be > 0");
            break;
    }
}

void LbfgsMemory::push(CorrectionPair p) {
    if (static_cast<int>(pairs_.size()) == cap_) pairs_.pop_front();
    pairs_.push_back(std::move(p));
}

double damped_theta(const Vector& s, const Vector& y, double tau_next, const HyperParams& hp) {
    const double sts = dot(s, s);
    if (!(sts > 0.0)) throw InvariantViolation("damped_theta: zero displacement");
    const double sty = dot(s, y);
    if (!std::isfinite(sty)) throw NonFinite("damped_theta: non-finite s'y");
    const double shifted = (tau_next + hp.delta) * sts;  // s'(tau I + delta I)s
    if (sty > 0.2 * shifted + hp.gamma * sts) return 1.0;
    double theta = (0.8 * shifted - hp.gamma * sts) / (shifted - sty);
    if (theta > 1.0 && theta < 1.0 + 1e-12) theta = 1.0;  // roundoff at the branch point
    if (!(theta > 0.0) || theta > 1.0 || !std::isfinite(theta))
        throw InvariantViolation("damped_theta: weight " + std::to_string(theta) +
                                 " outside (0,1]");
    return theta;
}

Vector modified_ydiff(const CorrectionPair& pair, const HyperParams& hp) {
    const double theta = damped_theta(pair.s, pair.y, pair.tau_next, hp);
    Vector out = scaled(pair.y, theta);
    axpy((1.0 - theta) * (pair.tau_next + hp.delta) - hp.gamma, pair.s, out);
    const double sts = dot(pair.s, pair.s);
    const double floor = 0.2 * (pair.tau_next + hp.delta) * sts;
    const double slack = 1e-12 * std::max(1.0, floor);
    if (dot(pair.s, out) < floor - slack)
        throw InvariantViolation("modified_ydiff: curvature fell below the damping floor");
    return out;
}

double initial_scaling(const Vector& s, const Vector& y, const HyperParams& hp) {
    const double sty = dot(s, y);
    if (!std::isfinite(sty)) throw NonFinite("initial_scaling: non-finite s'y");
    if (sty <= 0.0) return hp.beta;
    const double yty = dot(y, y);
    return std::max(yty / sty + hp.gamma, hp.beta);
}

SymMatrix build_hessian_approx(const LbfgsMemory& memory, double tau_t, const HyperParams& hp) {
    if (memory.empty()) throw InvariantViolation("build_hessian_approx: no stored pairs");
    if (!(tau_t > 0.0)) throw InvariantViolation("build_hessian_approx: tau must be > 0");
    const int d = static_cast<int>(memory[0].s.size());
    SymMatrix b(d, tau_t);
    for (int i = 0; i < memory.size(); ++i) {
        const CorrectionPair& pair = memory[i];
        if (static_cast<int>(pair.s.size()) != d)
            throw DimensionMismatch("build_hessian_approx: pair dimension changed");
        Vector ydd = modified_ydiff(pair, hp);
        const double sty = dot(pair.s, ydd);
        if (!(sty > 0.0))
            throw InvariantViolation("build_hessian_approx: s'y_mod not positive");
        const double sbs = b.quad_form(pair.s);
        if (!(sbs > 0.0))
            throw InvariantViolation("build_hessian_approx: s'Bs not positive");
        Vector bs = b.multiply(pair.s);
        b.add_outer(ydd, 1.0 / sty);
        b.add_outer(bs, -1.0 / sbs);
        b.add_diagonal(hp.gamma);
    }
    if (!b.finite()) throw NonFinite("build_hessian_approx: non-finite entry");
    // the spectrum must sit at or above the floor added with each update
    SymMatrix shifted(b);
    shifted.add_diagonal(-(hp.gamma - 1e-10));
    try {
        cholesky(shifted);
    } catch (const NotPositiveDefinite&) {
        throw InvariantViolation("build_hessian_approx: spectrum fell below the floor");
    }
    return b;
}

double step_size(long k, const StepRule& rule) {
    if (k < 1) throw InvariantViolation("step_size: iteration counter must be >= 1");
    switch (rule.kind) {
        case StepRule::Kind::RoverK:
            return rule.r / static_cast<double>(k);
        case StepRule::Kind::Constant:
            return rule.alpha;
        case StepRule::Kind::Analytic: {
            const double drift = 0.5 * rule.lipschitz * rule.eta0 / (rule.q_lower * rule.q_lower);
            return (rule.eta0 / rule.q_upper) /
                   (std::pow(static_cast<double>(k), rule.upsilon) + drift);
        }
    }
    throw InvariantViolation("step_size: unreachable");
}

SymMatrix classic_bfgs_update(const SymMatrix& b, const Vector& s, const Vector& y) {
    if (b.dim() != static_cast<int>(s.size()) || s.size() != y.size())
        throw DimensionMismatch("classic_bfgs_update: dimensions disagree");
    const double sty = dot(s, y);
    if (!(sty > 0.0))
        throw CurvatureNotPositive("classic_bfgs_update: s'y = " + std::to_string(sty));
    const double sbs = b.quad_form(s);
    if (!(sbs > 0.0)) throw NotPositiveDefinite("classic_bfgs_update: s'Bs not positive");
    SymMatrix out(b);
    Vector bs = b.multiply(s);
    out.add_outer(y, 1.0 / sty);
    out.add_outer(bs, -1.0 / sbs);
    return out;
}

double powell_theta(const Vector& s, const Vector& y, const SymMatrix& b) {
    const double sbs = b.quad_form(s);
    if (!(sbs > 0.0)) throw NotPositiveDefinite("powell_theta: s'Bs not positive");
    const double sty = dot(s, y);
    if (sty >= 0.2 * sbs) return 1.0;
    return 0.8 * sbs / (sbs - sty);
}

bool res_update_counterexample_check(const Vector& s, const Vector& y, const SymMatrix& b,
                                     double gamma) {
    const double theta = powell_theta(s, y, b);
    Vector ybar = scaled(y, theta);
    axpy(1.0 - theta, b.multiply(s), ybar);
    return dot(s, ybar) - gamma * dot(s, s) <= 0.0;
}

namespace {

double curvature_budget(double rho, double gamma, double delta, double beta) {
    const double lo = beta + delta;
    const double hi = beta + rho + gamma + delta;
    const double numer = 5.0 * (rho + gamma) * (rho + gamma);
    return std::max(numer / lo + 5.0 * lo, numer / hi + 5.0 * hi);
}

}  // namespace

double spectrum_upper_bound(double rho, double gamma, double delta, double beta, int m_tilde) {
    const double q = curvature_budget(rho, gamma, delta, beta);
    return beta + rho + gamma + static_cast<double>(m_tilde) * (q + 5.0 * rho + gamma);
}

double spectrum_lower_bound(double rho, double gamma, double delta, double beta, int m_tilde) {
    const double q = curvature_budget(rho, gamma, delta, beta);
    const double growth = q + 5.0 * rho;
    const double w = std::sqrt(growth / (0.2 * (beta + delta))) + 1.0;
    const double wpow = std::pow(w, 2.0 * m_tilde);
    const double q_tilde =
        (wpow - 1.0) / (growth + 2.0 * std::sqrt(0.2 * growth * (beta + delta))) + wpow / beta;
    double bound = 1.0 / q_tilde;
    if (gamma > 0.0) bound = std::max(bound, 1.0 / gamma);
    return bound;
}

}  // namespace sdreg
