#pragma once

#include <deque>

#include "sdreg/linalg.hpp"

namespace sdreg {

struct StepRule {
    enum class Kind { RoverK, Analytic, Constant };

    Kind kind = Kind::RoverK;
    double r = 7.0;       // RoverK: eta_k = r / k
    double alpha = 1e-3;  // Constant
    // Analytic: eta_k = eta0 * q_upper^{-1} / (k^upsilon + (lipschitz/2) eta0 q_lower^{-2})
    double eta0 = 1.0;
    double upsilon = 0.75;
    double q_upper = 1.0;
    double q_lower = 1.0;
    double lipschitz = 1.0;

    static StepRule rover_k(double r);
    static StepRule constant(double alpha);
    static StepRule analytic(double eta0, double upsilon, double q_upper, double q_lower,
                             double lipschitz);
};

struct HyperParams {
    double gamma = 1e-4;           // eigenvalue floor added at every inner update
    double delta = 1.25e-4 + 0.01; // damping offset; needs 0.8 * delta >= gamma
    double beta = 1.0;             // lower bound for the initial scaling tau
    int memory = 10;               // max stored correction pairs
    int interval = 10;             // iterations per averaging window
    int batch_size = 20;
    StepRule step;

    void validate() const;
};

// Displacement/gradient-difference pair with the initial scaling frozen at
// the moment the pair was formed.
struct CorrectionPair {
    Vector s;
    Vector y;
    double tau_next = 0.0;
};

// FIFO store of the most recent correction pairs, oldest first.
class LbfgsMemory {
  public:
    explicit LbfgsMemory(int capacity = 1) : cap_(capacity) {}

    void push(CorrectionPair p);
    int size() const { return static_cast<int>(pairs_.size()); }
    int capacity() const { return cap_; }
    bool empty() const { return pairs_.empty(); }
    const CorrectionPair& operator[](int i) const { return pairs_[static_cast<std::size_t>(i)]; }
    const CorrectionPair& newest() const { return pairs_.back(); }
    void clear() { pairs_.clear(); }

  private:
    int cap_;
    std::deque<CorrectionPair> pairs_;
};

// Damping weight against the shifted diagonal surrogate tau + delta:
// 1 when s'y clears 0.2 s'(tau+delta)s + gamma s's, otherwise the ratio that
// pins s'y_mod at the 0.2 threshold.  Always in (0, 1] when 0.8*delta >= gamma.
double damped_theta(const Vector& s, const Vector& y, double tau_next, const HyperParams& hp);

// y_mod = theta * y + (1 - theta) (tau + delta) s - gamma s.
Vector modified_ydiff(const CorrectionPair& pair, const HyperParams& hp);

// tau = max(y'y / s'y + gamma, beta); beta when s'y <= 0.
double initial_scaling(const Vector& s, const Vector& y, const HyperParams& hp);

// Dense curvature approximation: start from tau_t * I and apply one damped
// regularized update per stored pair, oldest to newest.  Every update adds
// gamma * I, which keeps the spectrum at or above gamma.
SymMatrix build_hessian_approx(const LbfgsMemory& memory, double tau_t, const HyperParams& hp);

// eta_k for 1-based iteration counter k.
double step_size(long k, const StepRule& rule);

// Textbook BFGS update; throws CurvatureNotPositive when s'y <= 0.
SymMatrix classic_bfgs_update(const SymMatrix& b, const Vector& s, const Vector& y);

// Classic damping weight against B itself (no shift, no floor).
double powell_theta(const Vector& s, const Vector& y, const SymMatrix& b);

// True when damping against B and then subtracting gamma * s leaves a
// non-positive curvature s'(y_bar - gamma s) <= 0, i.e. the plain
// regularized update would have been invalid for this input.
bool res_update_counterexample_check(const Vector& s, const Vector& y, const SymMatrix& b,
                                     double gamma);

// Spectrum bounds implied by a curvature bound rho on the sampled Hessians:
// an upper bound on ||B|| after m_tilde damped updates, and the matching
// lower-bound constant used by the analytic step-size schedule.
double spectrum_upper_bound(double rho, double gamma, double delta, double beta, int m_tilde);
double spectrum_lower_bound(double rho, double gamma, double delta, double beta, int m_tilde);

}  // namespace sdreg
