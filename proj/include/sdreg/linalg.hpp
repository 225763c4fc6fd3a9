#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace sdreg {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
// y += alpha * x
void axpy(double alpha, const Vector& x, Vector& y);
Vector scaled(const Vector& x, double alpha);
Vector subtract(const Vector& a, const Vector& b);
Vector add(const Vector& a, const Vector& b);
bool all_finite(const Vector& v);

// Dense row-major matrix; used for data tables and Jacobians.
class Matrix {
  public:
    Matrix() = default;
    Matrix(long rows, long cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), fill) {}

    double& operator()(long i, long j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
    double operator()(long i, long j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

    long rows() const { return rows_; }
    long cols() const { return cols_; }

    const double* row(long i) const { return a_.data() + i * cols_; }
    double* row(long i) { return a_.data() + i * cols_; }

  private:
    long rows_ = 0;
    long cols_ = 0;
    std::vector<double> a_;
};

// Dense symmetric matrix.  Both triangles are stored and every mutator
// writes them together, so reads never have to branch on index order.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(int d, double diag = 0.0);
    static SymMatrix identity(int d, double scale = 1.0) { return SymMatrix(d, scale); }

    int dim() const { return d_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * d_ + j]; }
    void set(int i, int j, double v);
    void add(int i, int j, double v);
    void add_diagonal(double c);
    // A += c * v v'
    void add_outer(const Vector& v, double c);

    Vector multiply(const Vector& x) const;
    // x' A x
    double quad_form(const Vector& x) const;
    double frobenius_norm() const;
    bool finite() const;

    const double* data() const { return a_.data(); }
    double* data() { return a_.data(); }

  private:
    int d_ = 0;
    std::vector<double> a_;
};

// Lower-triangular Cholesky factor of an SPD matrix.
struct Cholesky {
    Matrix lower;

    int dim() const { return static_cast<int>(lower.rows()); }
    Vector solve(const Vector& b) const;
    double log_det() const;
};

// Throws NotPositiveDefinite when a pivot is not strictly positive,
// DimensionMismatch on empty input, NonFinite on bad entries.
Cholesky cholesky(const SymMatrix& a);

Vector spd_solve(const SymMatrix& a, const Vector& b);
SymMatrix spd_inverse(const SymMatrix& a);

// Smallest and largest eigenvalue of a symmetric matrix via cyclic Jacobi
// sweeps; iterates until the off-diagonal mass falls below 1e-12 * ||A||_F.
std::pair<double, double> sym_eig_extremes(const SymMatrix& a);

}  // namespace sdreg
