#pragma once

#include "sdreg/dataset.hpp"
#include "sdreg/linalg.hpp"

namespace sdreg {

double sigmoid(double u);
// log(sigmoid(u)), stable for large |u|.
double log_sigmoid(double u);

// Mini-batch view of a finite-sum objective.  Implementations must keep
// the batch average equal in expectation to the full-data value.
class StochasticObjective {
  public:
    virtual ~StochasticObjective() = default;

    virtual int dim() const = 0;
    virtual long sample_count() const = 0;
    virtual double loss(const Vector& point, const Batch& batch) const = 0;
    virtual void stochastic_grad(const Vector& point, const Batch& batch, Vector& out) const = 0;

    Vector stochastic_grad(const Vector& point, const Batch& batch) const;
    Vector full_grad(const Vector& point) const;
    double full_loss(const Vector& point) const;
};

// Average negative log-likelihood over the batch.
double lr_loss(const Vector& theta, const Dataset& data, const Batch& batch);
// -(1/m) sum of (z_n - sigmoid(theta'x_n)) x_n.
Vector lr_stochastic_grad(const Vector& theta, const Dataset& data, const Batch& batch);

class LogisticRegression : public StochasticObjective {
  public:
    explicit LogisticRegression(const Dataset& data) : data_(&data) {}

    int dim() const override { return data_->dim(); }
    long sample_count() const override { return data_->size(); }
    double loss(const Vector& theta, const Batch& batch) const override {
        return lr_loss(theta, *data_, batch);
    }
    using StochasticObjective::stochastic_grad;
    void stochastic_grad(const Vector& theta, const Batch& batch, Vector& out) const override;

  private:
    const Dataset* data_;
};

}  // namespace sdreg
