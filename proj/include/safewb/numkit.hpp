#pragma once

// Minimal dense linear algebra for small problems (m, n up to a few dozen):
// vectors, row-major matrices, partial-pivot LU solves, row-wise
// Moore-Penrose inverses and symmetric eigenvalues via cyclic Jacobi.
// Everything is a pure value type; nothing here allocates global state.

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "safewb/errors.hpp"

namespace safewb {

// Entries below this are treated as rank deficiency, not round-off.
inline constexpr double kEpsRank = 1e-12;

class DenseVector {
  public:
    DenseVector() = default;
    explicit DenseVector(std::size_t n) : data_(n, 0.0) {}
    DenseVector(std::initializer_list<double> vals) : data_(vals) {}
    explicit DenseVector(std::vector<double> vals) : data_(std::move(vals)) {}

    std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

  private:
    std::vector<double> data_;
};

class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    DenseVector row(std::size_t i) const;
    DenseVector col(std::size_t j) const;
    void set_row(std::size_t i, const DenseVector& r);
    DenseMatrix transposed() const;

    bool all_finite() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Vector arithmetic. Dimension mismatches throw.
double dot(const DenseVector& a, const DenseVector& b);
double norm(const DenseVector& a);
double norm_inf(const DenseVector& a);
DenseVector add(const DenseVector& a, const DenseVector& b);
DenseVector sub(const DenseVector& a, const DenseVector& b);
DenseVector scale(const DenseVector& a, double s);

DenseVector matvec(const DenseMatrix& M, const DenseVector& v);
DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);

// a^T / ||a||^2, the minimum-norm right inverse of a nonzero row.
DenseVector row_pinv(const DenseVector& row, double eps_rank = kEpsRank);

// Column i of the result is row_pinv of row i of A, so diag(A * result) = 1.
DenseMatrix g_operator(const DenseMatrix& A, double eps_rank = kEpsRank);

// Partial-pivot LU solve of a square system. Throws SingularSystem when a
// pivot falls below eps_rank (relative to the matrix scale).
DenseVector solve_linear(const DenseMatrix& M, const DenseVector& rhs,
                         double eps_rank = kEpsRank);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& S);

// Tests the positive-semidefiniteness statement for A*G(A): forms the
// symmetric similar matrix D^{1/2} A A^T D^{1/2} with D = diag(1/||a_i||^2)
// (the cosine Gram matrix of the rows) and checks min eigenvalue >= -tol.
bool similar_psd_check(const DenseMatrix& A, double tol,
                       double eps_rank = kEpsRank);

// Numerical rank by Gaussian elimination with full pivoting.
std::size_t numeric_rank(const DenseMatrix& M, double tol = kEpsRank);

// Throws NonFiniteValue unless every entry is finite.
void require_finite(const DenseVector& v, const char* what);
void require_finite(const DenseMatrix& M, const char* what);

}  // namespace safewb
