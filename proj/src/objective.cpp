#include "sdreg/objective.hpp"

#include <cmath>

#include "sdreg/errors.hpp"

namespace sdreg {

double sigmoid(double u) {
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double log_sigmoid(double u) {
    if (u >= 0.0) return -std::log1p(std::exp(-u));
    return u - std::log1p(std::exp(u));
}

Vector StochasticObjective::stochastic_grad(const Vector& point, const Batch& batch) const {
    Vector out(point.size(), 0.0);
    stochastic_grad(point, batch, out);
    return out;
}

Vector StochasticObjective::full_grad(const Vector& point) const {
    return stochastic_grad(point, full_batch(sample_count()));
}

double StochasticObjective::full_loss(const Vector& point) const {
    return loss(point, full_batch(sample_count()));
}

double lr_loss(const Vector& theta, const Dataset& data, const Batch& batch) {
    if (static_cast<int>(theta.size()) != data.dim())
        throw DimensionMismatch("lr_loss: theta size vs data dim");
    if (batch.indices.empty()) throw DimensionMismatch("lr_loss: empty batch");
    double total = 0.0;
    for (int idx : batch.indices) {
        const double* x = data.features.row(idx);
        double u = 0.0;
        for (int j = 0; j < data.dim(); ++j) u += theta[static_cast<std::size_t>(j)] * x[j];
        const int z = data.labels[static_cast<std::size_t>(idx)];
        total -= z == 1 ? log_sigmoid(u) : log_sigmoid(-u);
    }
    return total / static_cast<double>(batch.size());
}

Vector lr_stochastic_grad(const Vector& theta, const Dataset& data, const Batch& batch) {
    if (static_cast<int>(theta.size()) != data.dim())
        throw DimensionMismatch("lr_stochastic_grad: theta size vs data dim");
    if (batch.indices.empty()) throw DimensionMismatch("lr_stochastic_grad: empty batch");
    Vector g(theta.size(), 0.0);
    const double inv_m = 1.0 / static_cast<double>(batch.size());
    for (int idx : batch.indices) {
        const double* x = data.features.row(idx);
        double u = 0.0;
        for (int j = 0; j < data.dim(); ++j) u += theta[static_cast<std::size_t>(j)] * x[j];
        const double resid = static_cast<double>(data.labels[static_cast<std::size_t>(idx)]) - sigmoid(u);
        const double c = -inv_m * resid;
        for (int j = 0; j < data.dim(); ++j) g[static_cast<std::size_t>(j)] += c * x[j];
    }
    return g;
}

void LogisticRegression::stochastic_grad(const Vector& theta, const Batch& batch,
                                         Vector& out) const {
    out = lr_stochastic_grad(theta, *data_, batch);
}

}  // namespace sdreg
