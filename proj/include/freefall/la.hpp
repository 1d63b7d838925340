#ifndef FREEFALL_LA_HPP
#define FREEFALL_LA_HPP

#include <vector>

namespace freefall {

// Dense row-major matrix. Sizes in this project never exceed (2N+1) <= 65,
// so everything below is written for clarity, not speed.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols),
        d_(static_cast<size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return d_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return d_[static_cast<size_t>(i) * cols_ + j]; }

    // max_{ij} |A_ij - A_ji|
    double symmetry_defect() const;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> d_;
};

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& x);

// Solves A x = rhs in place by LU with partial pivoting. Returns false when a
// pivot falls below the singularity cutoff.
bool lu_solve(Matrix a, std::vector<double> rhs, std::vector<double>& x);

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j is the eigenvector of values[j]
};

// Cyclic Jacobi diagonalization of a symmetric matrix. Throws EigenFailure if
// the off-diagonal mass has not vanished after the sweep limit.
SymmetricEigen eig_symmetric(const Matrix& a);

} // namespace freefall

#endif
