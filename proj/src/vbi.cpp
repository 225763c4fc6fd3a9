#include "sdreg/vbi.hpp"

#include <cmath>
#include <utility>

#include "sdreg/errors.hpp"

namespace sdreg {

void VariationalParams::validate() const {
    const int d = static_cast<int>(mu.size());
    if (S.dim() != d || S0.dim() != d)
        throw DimensionMismatch("VariationalParams: mu/S/S0 dimensions disagree");
    if (!all_finite(mu) || !S.finite() || !S0.finite())
        throw NonFinite("VariationalParams: non-finite entry");
}

double blr_d_value(const Vector& theta, const VariationalParams& vp, const Dataset& data,
                   const Batch& batch) {
    const double n = static_cast<double>(data.size());
    const double prior = 0.5 * spd_inverse(vp.S0).quad_form(theta) / n;
    return lr_loss(theta, data, batch) + prior;
}

Vector blr_stochastic_grad_mu(const VariationalParams& vp, const Dataset& data,
                              const Batch& batch) {
    const int d = data.dim();
    if (static_cast<int>(vp.mu.size()) != d || vp.S.dim() != d || vp.S0.dim() != d)
        throw DimensionMismatch("blr_stochastic_grad_mu: dimensions disagree");
    if (batch.indices.empty()) throw DimensionMismatch("blr_stochastic_grad_mu: empty batch");

    Vector g(static_cast<std::size_t>(d), 0.0);
    const double inv_m = 1.0 / static_cast<double>(batch.size());
    Vector x(static_cast<std::size_t>(d));
    for (int idx : batch.indices) {
        const double* row = data.features.row(idx);
        double u = 0.0;
        for (int j = 0; j < d; ++j) {
            x[static_cast<std::size_t>(j)] = row[j];
            u += vp.mu[static_cast<std::size_t>(j)] * row[j];
        }
        const double sig = sigmoid(u);
        const double resid = static_cast<double>(data.labels[static_cast<std::size_t>(idx)]) - sig;
        const double bend = sig * (1.0 - sig) * (1.0 - 2.0 * sig);
        const double quad = vp.S.quad_form(x);
        const double c = inv_m * (-resid + 0.5 * bend * quad);
        for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(j)] += c * row[j];
    }
    // prior is averaged over the whole sample, not the batch
    Vector prior = spd_inverse(vp.S0).multiply(vp.mu);
    axpy(1.0 / static_cast<double>(data.size()), prior, g);
    return g;
}

SymMatrix blr_hessian_d(const Vector& mu, const VariationalParams& vp, const Dataset& data) {
    const int d = data.dim();
    const long n = data.size();
    SymMatrix h(d);
    Vector x(static_cast<std::size_t>(d));
    for (long i = 0; i < n; ++i) {
        const double* row = data.features.row(i);
        double u = 0.0;
        for (int j = 0; j < d; ++j) {
            x[static_cast<std::size_t>(j)] = row[j];
            u += mu[static_cast<std::size_t>(j)] * row[j];
        }
        const double sig = sigmoid(u);
        h.add_outer(x, sig * (1.0 - sig) / static_cast<double>(n));
    }
    SymMatrix s0_inv = spd_inverse(vp.S0);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            h.add(i, j, s0_inv(i, j) / static_cast<double>(n));
    return h;
}

double blr_delta_objective(const VariationalParams& vp, const Dataset& data) {
    const Batch all = full_batch(data.size());
    const double d_mu = blr_d_value(vp.mu, vp, data, all);
    SymMatrix h = blr_hessian_d(vp.mu, vp, data);
    double trace_hs = 0.0;
    const int d = data.dim();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) trace_hs += h(i, j) * vp.S(j, i);
    const double logdet_s = cholesky(vp.S).log_det();
    return d_mu + 0.5 * (trace_hs - logdet_s);
}

SymMatrix blr_update_S(const VariationalParams& vp, const Dataset& data) {
    return spd_inverse(blr_hessian_d(vp.mu, vp, data));
}

BayesianLogisticRegression::BayesianLogisticRegression(const Dataset& data, SymMatrix s0)
    : data_(&data), s0_(std::move(s0)) {
    if (s0_.dim() != data_->dim())
        throw DimensionMismatch("BayesianLogisticRegression: prior dim vs data dim");
    s0_inv_ = spd_inverse(s0_);
    set_covariance(s0_);
}

void BayesianLogisticRegression::set_covariance(SymMatrix s) {
    if (s.dim() != data_->dim())
        throw DimensionMismatch("BayesianLogisticRegression: covariance dim");
    logdet_s_ = cholesky(s).log_det();
    const int d = s.dim();
    tr_s0inv_s_ = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) tr_s0inv_s_ += s0_inv_(i, j) * s(j, i);
    s_ = std::move(s);
}

void BayesianLogisticRegression::refresh_covariance(const Vector& mu) {
    set_covariance(blr_update_S(params(mu), *data_));
}

VariationalParams BayesianLogisticRegression::params(const Vector& mu) const {
    return VariationalParams{mu, s_, s0_};
}

double BayesianLogisticRegression::loss(const Vector& mu, const Batch& batch) const {
    const int d = data_->dim();
    if (static_cast<int>(mu.size()) != d)
        throw DimensionMismatch("BayesianLogisticRegression::loss: mu size");
    const double n = static_cast<double>(data_->size());
    double nll = lr_loss(mu, *data_, batch);
    const double prior = 0.5 * s0_inv_.quad_form(mu) / n;

    // batch estimate of tr(H(mu) S)
    double trace_data = 0.0;
    Vector x(static_cast<std::size_t>(d));
    for (int idx : batch.indices) {
        const double* row = data_->features.row(idx);
        double u = 0.0;
        for (int j = 0; j < d; ++j) {
            x[static_cast<std::size_t>(j)] = row[j];
            u += mu[static_cast<std::size_t>(j)] * row[j];
        }
        const double sig = sigmoid(u);
        trace_data += sig * (1.0 - sig) * s_.quad_form(x);
    }
    trace_data /= static_cast<double>(batch.size());
    return nll + prior + 0.5 * (trace_data + tr_s0inv_s_ / n - logdet_s_);
}

void BayesianLogisticRegression::stochastic_grad(const Vector& mu, const Batch& batch,
                                                 Vector& out) const {
    const int d = data_->dim();
    if (static_cast<int>(mu.size()) != d)
        throw DimensionMismatch("BayesianLogisticRegression::stochastic_grad: mu size");
    out.assign(static_cast<std::size_t>(d), 0.0);
    const double inv_m = 1.0 / static_cast<double>(batch.size());
    Vector x(static_cast<std::size_t>(d));
    for (int idx : batch.indices) {
        const double* row = data_->features.row(idx);
        double u = 0.0;
        for (int j = 0; j < d; ++j) {
            x[static_cast<std::size_t>(j)] = row[j];
            u += mu[static_cast<std::size_t>(j)] * row[j];
        }
        const double sig = sigmoid(u);
        const double resid = static_cast<double>(data_->labels[static_cast<std::size_t>(idx)]) - sig;
        const double bend = sig * (1.0 - sig) * (1.0 - 2.0 * sig);
        const double c = inv_m * (-resid + 0.5 * bend * s_.quad_form(x));
        for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] += c * row[j];
    }
    Vector prior = s0_inv_.multiply(mu);
    axpy(1.0 / static_cast<double>(data_->size()), prior, out);
}

double conjugate_objective(const Vector& phi, const ConjugateModel& model) {
    Vector eta = model.eta_l(phi);
    Vector centered = subtract(eta, model.target);
    return dot(centered, model.log_partition_grad(eta)) - model.log_partition(eta);
}

Vector conjugate_grad_phi(const Vector& phi, const ConjugateModel& model) {
    Vector eta = model.eta_l(phi);
    if (eta.size() != model.target.size())
        throw DimensionMismatch("conjugate_grad_phi: eta_l size vs target size");
    Matrix jac = model.eta_l_jacobian(phi);
    if (jac.rows() != static_cast<long>(eta.size()) ||
        jac.cols() != static_cast<long>(phi.size()))
        throw DimensionMismatch("conjugate_grad_phi: Jacobian shape");
    Vector centered = subtract(eta, model.target);
    Vector weighted = model.log_partition_hess(eta).multiply(centered);
    Vector out(phi.size(), 0.0);
    for (long j = 0; j < jac.cols(); ++j) {
        double s = 0.0;
        for (long i = 0; i < jac.rows(); ++i) s += jac(i, j) * weighted[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(j)] = s;
    }
    return out;
}

}  // namespace sdreg
