#include "sdreg/metrics.hpp"

#include "sdreg/objective.hpp"

namespace sdreg {

double compute_nog_lr(const Vector& theta, const Dataset& data) {
    return norm(lr_stochastic_grad(theta, data, full_batch(data.size())));
}

double compute_nog_blr(const VariationalParams& vp, const Dataset& data) {
    return norm(blr_stochastic_grad_mu(vp, data, full_batch(data.size())));
}

double compute_acc(const Vector& theta, const Dataset& data) {
    long hits = 0;
    const int d = data.dim();
    for (long i = 0; i < data.size(); ++i) {
        const double* x = data.features.row(i);
        double u = 0.0;
        for (int j = 0; j < d; ++j) u += theta[static_cast<std::size_t>(j)] * x[j];
        const int predicted = u >= 0.0 ? 1 : 0;  // sigmoid(u) >= 0.5
        if (predicted == data.labels[static_cast<std::size_t>(i)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace sdreg
