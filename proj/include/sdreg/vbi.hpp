#pragma once

#include <functional>

#include "sdreg/dataset.hpp"
#include "sdreg/linalg.hpp"
#include "sdreg/objective.hpp"

namespace sdreg {

// Gaussian variational state for Bayesian logistic regression: posterior
// mean mu, posterior covariance S, prior covariance S0.
struct VariationalParams {
    Vector mu;
    SymMatrix S;
    SymMatrix S0;

    void validate() const;
};

// Per-sample average of the negative complete-data log-density evaluated at
// theta: batch-average logistic loss plus the prior quadratic (1/N) * 0.5 *
// theta'S0^{-1}theta.
double blr_d_value(const Vector& theta, const VariationalParams& vp, const Dataset& data,
                   const Batch& batch);

// Gradient in mu of the second-order variational objective, batch form.
// Data terms are averaged over the batch; the prior contributes
// (1/N) S0^{-1} mu regardless of batch size.
Vector blr_stochastic_grad_mu(const VariationalParams& vp, const Dataset& data,
                              const Batch& batch);

// Hessian of the averaged objective: (1/N) sum sig(1-sig) x x' + (1/N) S0^{-1}.
SymMatrix blr_hessian_d(const Vector& mu, const VariationalParams& vp, const Dataset& data);

// Full second-order variational objective:
//   d(mu) + 0.5 * (tr(H(mu) S) - log det S).
double blr_delta_objective(const VariationalParams& vp, const Dataset& data);

// Closed-form covariance refresh: S <- H(mu)^{-1} on the full data.
SymMatrix blr_update_S(const VariationalParams& vp, const Dataset& data);

class BayesianLogisticRegression : public StochasticObjective {
  public:
    BayesianLogisticRegression(const Dataset& data, SymMatrix s0);

    int dim() const override { return data_->dim(); }
    long sample_count() const override { return data_->size(); }
    double loss(const Vector& mu, const Batch& batch) const override;
    using StochasticObjective::stochastic_grad;
    void stochastic_grad(const Vector& mu, const Batch& batch, Vector& out) const override;

    const SymMatrix& covariance() const { return s_; }
    void set_covariance(SymMatrix s);
    // S <- inverse of the full-data Hessian at mu.
    void refresh_covariance(const Vector& mu);
    VariationalParams params(const Vector& mu) const;

  private:
    const Dataset* data_;
    SymMatrix s_;
    SymMatrix s0_;
    SymMatrix s0_inv_;
    double logdet_s_ = 0.0;
    double tr_s0inv_s_ = 0.0;
};

// Exponential-family pieces needed to differentiate the collapsed local
// objective with respect to a local variational parameter phi.
struct ConjugateModel {
    std::function<Vector(const Vector&)> eta_l;
    std::function<Matrix(const Vector&)> eta_l_jacobian;
    std::function<double(const Vector&)> log_partition;
    std::function<Vector(const Vector&)> log_partition_grad;
    std::function<SymMatrix(const Vector&)> log_partition_hess;
    // Sufficient statistics of the observation concatenated with the
    // base-measure count, plus the expected global natural parameter.
    Vector target;
};

// Collapsed local objective (eta_l(phi) - target)' grad_a(eta_l(phi)) - a(eta_l(phi)).
double conjugate_objective(const Vector& phi, const ConjugateModel& model);

// Gradient of the collapsed local objective:
//   J(phi)' hess_a(eta_l(phi)) (eta_l(phi) - target).
Vector conjugate_grad_phi(const Vector& phi, const ConjugateModel& model);

}  // namespace sdreg
