#pragma once

#include "sdreg/dataset.hpp"
#include "sdreg/linalg.hpp"
#include "sdreg/vbi.hpp"

namespace sdreg {

// Norm of the full-data logistic gradient.
double compute_nog_lr(const Vector& theta, const Dataset& data);

// Norm of the full-data variational gradient in mu at the given state.
double compute_nog_blr(const VariationalParams& vp, const Dataset& data);

// Fraction of rows whose thresholded prediction sigmoid(theta'x) >= 0.5
// matches the label.
double compute_acc(const Vector& theta, const Dataset& data);

}  // namespace sdreg
