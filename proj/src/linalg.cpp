#include "sdreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdreg/errors.hpp"

namespace sdreg {

namespace {

void require_same_size(const Vector& a, const Vector& b, const char* where) {
    if (a.size() != b.size())
        throw DimensionMismatch(std::string(where) + ": vector sizes " +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

}  // namespace

double dot(const Vector& a, const Vector& b) {
    require_same_size(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vector& x, Vector& y) {
    require_same_size(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector scaled(const Vector& x, double alpha) {
    Vector out(x);
    for (double& v : out) v *= alpha;
    return out;
}

Vector subtract(const Vector& a, const Vector& b) {
    require_same_size(a, b, "subtract");
    Vector out(a);
    for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    return out;
}

Vector add(const Vector& a, const Vector& b) {
    require_same_size(a, b, "add");
    Vector out(a);
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

SymMatrix::SymMatrix(int d, double diag) : d_(d), a_(static_cast<std::size_t>(d) * d, 0.0) {
    for (int i = 0; i < d; ++i) a_[static_cast<std::size_t>(i) * d + i] = diag;
}

void SymMatrix::set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * d_ + j] = v;
    a_[static_cast<std::size_t>(j) * d_ + i] = v;
}

void SymMatrix::add(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * d_ + j] += v;
    if (i != j) a_[static_cast<std::size_t>(j) * d_ + i] += v;
}

void SymMatrix::add_diagonal(double c) {
    for (int i = 0; i < d_; ++i) a_[static_cast<std::size_t>(i) * d_ + i] += c;
}

void SymMatrix::add_outer(const Vector& v, double c) {
    if (static_cast<int>(v.size()) != d_) throw DimensionMismatch("add_outer: size mismatch");
    for (int i = 0; i < d_; ++i) {
        const double ci = c * v[static_cast<std::size_t>(i)];
        double* row = a_.data() + static_cast<std::size_t>(i) * d_;
        for (int j = 0; j < d_; ++j) row[j] += ci * v[static_cast<std::size_t>(j)];
    }
}

Vector SymMatrix::multiply(const Vector& x) const {
    if (static_cast<int>(x.size()) != d_) throw DimensionMismatch("SymMatrix::multiply");
    Vector out(static_cast<std::size_t>(d_), 0.0);
    for (int i = 0; i < d_; ++i) {
        const double* row = a_.data() + static_cast<std::size_t>(i) * d_;
        double s = 0.0;
        for (int j = 0; j < d_; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

double SymMatrix::quad_form(const Vector& x) const {
    if (static_cast<int>(x.size()) != d_) throw DimensionMismatch("SymMatrix::quad_form");
    double total = 0.0;
    for (int i = 0; i < d_; ++i) {
        const double* row = a_.data() + static_cast<std::size_t>(i) * d_;
        double s = 0.0;
        for (int j = 0; j < d_; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
        total += x[static_cast<std::size_t>(i)] * s;
    }
    return total;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

bool SymMatrix::finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

Vector Cholesky::solve(const Vector& b) const {
    const int d = dim();
    if (static_cast<int>(b.size()) != d) throw DimensionMismatch("Cholesky::solve");
    Vector y(b);
    for (int i = 0; i < d; ++i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) s -= lower(i, j) * y[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s / lower(i, i);
    }
    for (int i = d - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < d; ++j) s -= lower(j, i) * y[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s / lower(i, i);
    }
    return y;
}

double Cholesky::log_det() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += std::log(lower(i, i));
    return 2.0 * s;
}

Cholesky cholesky(const SymMatrix& a) {
    const int d = a.dim();
    if (d == 0) throw DimensionMismatch("cholesky: empty matrix");
    if (!a.finite()) throw NonFinite("cholesky: non-finite entry");
    Cholesky f{Matrix(d, d, 0.0)};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= f.lower(i, k) * f.lower(j, k);
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s))
                    throw NotPositiveDefinite("cholesky: pivot " + std::to_string(s) +
                                              " at index " + std::to_string(i));
                f.lower(i, i) = std::sqrt(s);
            } else {
                f.lower(i, j) = s / f.lower(j, j);
            }
        }
    }
    return f;
}

Vector spd_solve(const SymMatrix& a, const Vector& b) {
    if (a.dim() != static_cast<int>(b.size()))
        throw DimensionMismatch("spd_solve: matrix dim " + std::to_string(a.dim()) +
                                " vs vector " + std::to_string(b.size()));
    return cholesky(a).solve(b);
}

SymMatrix spd_inverse(const SymMatrix& a) {
    const int d = a.dim();
    Cholesky f = cholesky(a);
    SymMatrix inv(d);
    Vector e(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        Vector col = f.solve(e);
        e[static_cast<std::size_t>(j)] = 0.0;
        for (int i = j; i < d; ++i) inv.set(i, j, col[static_cast<std::size_t>(i)]);
    }
    return inv;
}

std::pair<double, double> sym_eig_extremes(const SymMatrix& a) {
    const int d = a.dim();
    if (d == 0) throw DimensionMismatch("sym_eig_extremes: empty matrix");
    if (!a.finite()) throw NonFinite("sym_eig_extremes: non-finite entry");
    SymMatrix w(a);
    const double scale = w.frobenius_norm();
    if (scale == 0.0) return {0.0, 0.0};
    const double tol = 1e-12 * scale;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) s += 2.0 * w(i, j) * w(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = w(p, q);
                if (std::abs(apq) <= tol / (d * d)) continue;
                const double app = w(p, p);
                const double aqq = w(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                w.set(p, p, app - t * apq);
                w.set(q, q, aqq + t * apq);
                w.set(p, q, 0.0);
                for (int i = 0; i < d; ++i) {
                    if (i == p || i == q) continue;
                    const double wip = w(i, p);
                    const double wiq = w(i, q);
                    w.set(i, p, c * wip - s * wiq);
                    w.set(i, q, s * wip + c * wiq);
                }
            }
        }
    }

    double lo = w(0, 0);
    double hi = w(0, 0);
    for (int i = 1; i < d; ++i) {
        lo = std::min(lo, w(i, i));
        hi = std::max(hi, w(i, i));
    }
    return {lo, hi};
}

}  // namespace sdreg
