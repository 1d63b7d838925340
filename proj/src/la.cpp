#include "freefall/la.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "freefall/errors.hpp"

namespace freefall {

double Matrix::symmetry_defect() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
}

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m.cols())
        throw std::invalid_argument("mat_vec: size mismatch");
    std::vector<double> y(static_cast<size_t>(m.rows()), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

bool lu_solve(Matrix a, std::vector<double> rhs, std::vector<double>& x) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("lu_solve: size mismatch");

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    const double tiny = std::max(scale, 1.0) * 1e-14;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::fabs(a(i, col)) > std::fabs(a(piv, col))) piv = i;
        if (std::fabs(a(piv, col)) < tiny) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(rhs[col], rhs[piv]);
        }
        for (int i = col + 1; i < n; ++i) {
            const double f = a(i, col) / a(col, col);
            a(i, col) = 0.0;
            for (int j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
            rhs[i] -= f * rhs[col];
        }
    }
    x.assign(static_cast<size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return true;
}

SymmetricEigen eig_symmetric(const Matrix& a0) {
    const int n = a0.rows();
    if (a0.cols() != n) throw std::invalid_argument("eig_symmetric: not square");

    Matrix a = a0;
    Matrix v(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    auto off = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    const double tol = std::max(scale, 1.0) * 1e-15 * n;

    const int max_sweeps = 64;
    int sweep = 0;
    while (off() > tol) {
        if (++sweep > max_sweeps)
            throw EigenFailure("eig_symmetric: Jacobi sweeps exhausted");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= tol / (n * n)) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) diag[i] = a(i, i);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return diag[i] < diag[j]; });

    SymmetricEigen out;
    out.values.resize(static_cast<size_t>(n));
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

} // namespace freefall
