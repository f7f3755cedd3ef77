#include "safewb/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace safewb {

namespace {

void check_same_size(const DenseVector& a, const DenseVector& b, const char* op) {
    if (a.size() != b.size())
        throw DimensionMismatch(std::string(op) + ": vector sizes " +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

}  // namespace

bool DenseVector::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    if (r == 0) throw DimensionMismatch("from_rows: empty matrix");
    const std::size_t c = rows.begin()->size();
    DenseMatrix M(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionMismatch("from_rows: ragged rows");
        std::size_t j = 0;
        for (double v : row) M(i, j++) = v;
        ++i;
    }
    return M;
}

DenseVector DenseMatrix::row(std::size_t i) const {
    DenseVector r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
}

DenseVector DenseMatrix::col(std::size_t j) const {
    DenseVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void DenseMatrix::set_row(std::size_t i, const DenseVector& r) {
    if (r.size() != cols_) throw DimensionMismatch("set_row: length mismatch");
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = r[j];
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix T(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
}

double dot(const DenseVector& a, const DenseVector& b) {
    check_same_size(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const DenseVector& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const DenseVector& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

DenseVector add(const DenseVector& a, const DenseVector& b) {
    check_same_size(a, b, "add");
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

DenseVector sub(const DenseVector& a, const DenseVector& b) {
    check_same_size(a, b, "sub");
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

DenseVector scale(const DenseVector& a, double s) {
    DenseVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

DenseVector matvec(const DenseMatrix& M, const DenseVector& v) {
    if (M.cols() != v.size())
        throw DimensionMismatch("matvec: " + std::to_string(M.cols()) + " cols vs vector " +
                                std::to_string(v.size()));
    DenseVector r(M.rows());
    for (std::size_t i = 0; i < M.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < M.cols(); ++j) s += M(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols() != B.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
    DenseMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

DenseVector row_pinv(const DenseVector& row, double eps_rank) {
    const double nrm = norm(row);
    if (nrm <= eps_rank)
        throw DegenerateRow(0, "row_pinv: row norm " + std::to_string(nrm) +
                                   " below rank tolerance");
    return scale(row, 1.0 / (nrm * nrm));
}

DenseMatrix g_operator(const DenseMatrix& A, double eps_rank) {
    DenseMatrix H(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const DenseVector ri = A.row(i);
        if (norm(ri) <= eps_rank)
            throw DegenerateRow(i, "g_operator: row " + std::to_string(i) +
                                       " has norm below rank tolerance");
        const DenseVector p = row_pinv(ri, eps_rank);
        for (std::size_t j = 0; j < A.cols(); ++j) H(j, i) = p[j];
    }
    return H;
}

namespace {

// Packed partial-pivot LU of a square matrix.
struct LuFactors {
    DenseMatrix lu;
    std::vector<std::size_t> perm;
};

LuFactors lu_factor(const DenseMatrix& M, double eps_rank) {
    const std::size_t n = M.rows();
    LuFactors f{M, std::vector<std::size_t>(n)};
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(f.lu(i, j)));
    const double pivot_tol = eps_rank * std::max(1.0, scale);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(f.lu(i, k)) > std::abs(f.lu(piv, k))) piv = i;
        if (std::abs(f.lu(piv, k)) <= pivot_tol)
            throw SingularSystem("solve_linear: pivot below tolerance at column " +
                                 std::to_string(k));
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = f.lu(i, k) / f.lu(k, k);
            f.lu(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
        }
    }
    return f;
}

DenseVector lu_apply(const LuFactors& f, const DenseVector& rhs) {
    const std::size_t n = rhs.size();
    DenseVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

}  // namespace

DenseVector solve_linear(const DenseMatrix& M, const DenseVector& rhs, double eps_rank) {
    if (M.rows() != M.cols()) throw DimensionMismatch("solve_linear: matrix not square");
    if (M.rows() != rhs.size()) throw DimensionMismatch("solve_linear: rhs length mismatch");
    require_finite(M, "solve_linear matrix");
    require_finite(rhs, "solve_linear rhs");

    const LuFactors f = lu_factor(M, eps_rank);
    DenseVector x = lu_apply(f, rhs);
    // One round of iterative refinement buys back digits lost to mild
    // ill-conditioning in the working-set Gram systems.
    const DenseVector residual = sub(rhs, matvec(M, x));
    const DenseVector correction = lu_apply(f, residual);
    return add(x, correction);
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& S) {
    if (S.rows() != S.cols()) throw DimensionMismatch("symmetric_eigenvalues: not square");
    const std::size_t n = S.rows();
    DenseMatrix a = S;
    // Symmetrize to kill representation asymmetry from the caller.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = m;
            a(j, i) = m;
        }

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30 * std::max(1.0, static_cast<double>(n))) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

bool similar_psd_check(const DenseMatrix& A, double tol, double eps_rank) {
    const std::size_t m = A.rows();
    std::vector<double> inv_norm(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double nrm = norm(A.row(i));
        if (nrm <= eps_rank)
            throw DegenerateRow(i, "similar_psd_check: row " + std::to_string(i) +
                                       " has norm below rank tolerance");
        inv_norm[i] = 1.0 / nrm;
    }
    DenseMatrix S(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double s = dot(A.row(i), A.row(j)) * inv_norm[i] * inv_norm[j];
            S(i, j) = s;
            S(j, i) = s;
        }
    const std::vector<double> eig = symmetric_eigenvalues(S);
    return eig.front() >= -tol;
}

std::size_t numeric_rank(const DenseMatrix& M, double tol) {
    DenseMatrix a = M;
    const std::size_t r = a.rows(), c = a.cols();
    double scale_ = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) scale_ = std::max(scale_, std::abs(a(i, j)));
    const double thresh = tol * std::max(1.0, scale_);

    std::size_t rank = 0;
    std::vector<bool> used_row(r, false);
    for (std::size_t col = 0; col < c && rank < r; ++col) {
        std::size_t piv = r;
        double best = thresh;
        for (std::size_t i = 0; i < r; ++i) {
            if (used_row[i]) continue;
            if (std::abs(a(i, col)) > best) {
                best = std::abs(a(i, col));
                piv = i;
            }
        }
        if (piv == r) continue;
        used_row[piv] = true;
        ++rank;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == piv || std::abs(a(i, col)) <= 0.0) continue;
            const double f = a(i, col) / a(piv, col);
            for (std::size_t j = 0; j < c; ++j) a(i, j) -= f * a(piv, j);
        }
    }
    return rank;
}

void require_finite(const DenseVector& v, const char* what) {
    if (!v.all_finite()) throw NonFiniteValue(std::string(what) + ": non-finite entry");
}

void require_finite(const DenseMatrix& M, const char* what) {
    if (!M.all_finite()) throw NonFiniteValue(std::string(what) + ": non-finite entry");
}

}  // namespace safewb
