#include "safewb/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace safewb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> row_norms(const DenseMatrix& A, double eps_rank, const char* who) {
    std::vector<double> rn(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        rn[i] = norm(A.row(i));
        if (rn[i] <= eps_rank)
            throw DegenerateRow(i, std::string(who) + ": row " + std::to_string(i) +
                                       " has norm below rank tolerance");
    }
    return rn;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dual active-set projection.
//
// Invariants kept across iterations: the working set W holds linearly
// independent rows, x = A_W^T lambda_W, and lambda_W >= 0. Each pass picks
// the most violated constraint p and steps along z, the component of a_p
// orthogonal to the span of W rows. The step is capped by the first working
// multiplier driven to zero (partial step, drop that row) or by constraint p
// becoming tight (full step, add p). When a_p is dependent on W and no
// multiplier blocks, the dual is unbounded and the problem is infeasible.
// ---------------------------------------------------------------------------

SafeSolve qp_min_norm(const GeneralFormProblem& problem, const SolverOptions& opts) {
    const DenseMatrix& A = problem.A;
    const DenseVector& b = problem.b;
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    if (b.size() != m) throw DimensionMismatch("qp_min_norm: b length mismatch");
    require_finite(A, "qp_min_norm A");
    require_finite(b, "qp_min_norm b");

    std::vector<double> rn = row_norms(A, opts.eps_rank, "qp_min_norm");
    const double feas_tol = opts.feas_tol_scale * (1.0 + norm_inf(b));
    const std::size_t iter_cap = opts.qp_iter_per_row * std::max<std::size_t>(m, 1);

    std::vector<std::size_t> W;
    std::vector<double> lamW;
    DenseVector x(n);
    std::size_t iters = 0;

    auto gram_solve = [&](const std::vector<double>& rhs) {
        const std::size_t k = W.size();
        DenseMatrix G(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < n; ++c) s += A(W[i], c) * A(W[j], c);
                G(i, j) = s;
                G(j, i) = s;
            }
        DenseVector r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = rhs[i];
        return solve_linear(G, r, opts.eps_rank);
    };

    auto make_result = [&](SolveStatus status) {
        SafeSolve out;
        out.status = status;
        out.iterations = iters;
        out.x_star = DenseVector(n);
        out.lambda_star = DenseVector(m);
        if (status != SolveStatus::Optimal) return out;

        // Polish: recompute the multipliers from the final working set so the
        // KKT certificate is limited by one linear solve, not by drift
        // accumulated over partial steps. Revert if polishing went degenerate.
        bool polished = false;
        if (!W.empty()) {
            std::vector<double> bw(W.size());
            for (std::size_t i = 0; i < W.size(); ++i) bw[i] = b[W[i]];
            try {
                DenseVector lam = gram_solve(bw);
                double lam_min = 0.0;
                for (std::size_t i = 0; i < lam.size(); ++i)
                    lam_min = std::min(lam_min, lam[i]);
                if (lam_min >= -1e-11) {
                    DenseVector xp(n);
                    for (std::size_t i = 0; i < W.size(); ++i)
                        for (std::size_t c = 0; c < n; ++c) xp[c] += lam[i] * A(W[i], c);
                    double worst = 0.0;
                    for (std::size_t i = 0; i < m; ++i)
                        worst = std::min(worst, dot(A.row(i), xp) - b[i]);
                    if (worst >= -feas_tol) {
                        out.x_star = xp;
                        for (std::size_t i = 0; i < W.size(); ++i)
                            out.lambda_star[W[i]] = std::max(0.0, lam[i]);
                        polished = true;
                    }
                }
            } catch (const SingularSystem&) {
                // fall through to unpolished values
            }
        }
        if (!polished) {
            out.x_star = x;
            for (std::size_t i = 0; i < W.size(); ++i)
                out.lambda_star[W[i]] = std::max(0.0, lamW[i]);
        }
        out.active_set.assign(W.begin(), W.end());
        std::sort(out.active_set.begin(), out.active_set.end());
        return out;
    };

    while (true) {
        if (++iters > iter_cap)
            throw IterationLimit("qp_min_norm: iteration cap " + std::to_string(iter_cap) +
                                 " reached (numerical cycling?)");

        // Most violated constraint; ties to the lowest index.
        std::size_t p = m;
        double worst = -feas_tol;
        for (std::size_t i = 0; i < m; ++i) {
            const double s = dot(A.row(i), x) - b[i];
            if (s < worst) {
                worst = s;
                p = i;
            }
        }
        if (p == m) return make_result(SolveStatus::Optimal);

        const DenseVector a_p = A.row(p);
        double lam_p = 0.0;

        while (true) {
            if (++iters > iter_cap)
                throw IterationLimit("qp_min_norm: iteration cap " + std::to_string(iter_cap) +
                                     " reached (numerical cycling?)");
            const std::size_t k = W.size();
            DenseVector r(k);
            if (k > 0) {
                std::vector<double> rhs(k);
                for (std::size_t i = 0; i < k; ++i) rhs[i] = dot(A.row(W[i]), a_p);
                r = gram_solve(rhs);
            }
            DenseVector z = a_p;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t c = 0; c < n; ++c) z[c] -= r[i] * A(W[i], c);
            const double z2 = dot(z, z);
            const bool independent = z2 > 1e-12 * rn[p] * rn[p];

            const double sp = dot(a_p, x) - b[p];
            const double t_full = independent ? -sp / z2 : kInf;

            double t_partial = kInf;
            std::size_t blocking = k;
            for (std::size_t j = 0; j < k; ++j) {
                if (r[j] > 1e-12) {
                    const double tj = lamW[j] / r[j];
                    if (tj < t_partial) {
                        t_partial = tj;
                        blocking = j;
                    }
                }
            }

            if (t_full == kInf && t_partial == kInf)
                return make_result(SolveStatus::Infeasible);

            const double t = std::max(0.0, std::min(t_full, t_partial));
            for (std::size_t j = 0; j < k; ++j) lamW[j] -= t * r[j];
            lam_p += t;
            if (independent)
                for (std::size_t c = 0; c < n; ++c) x[c] += t * z[c];

            if (t_full <= t_partial) {
                W.push_back(p);
                lamW.push_back(lam_p);
                break;
            }
            W.erase(W.begin() + static_cast<std::ptrdiff_t>(blocking));
            lamW.erase(lamW.begin() + static_cast<std::ptrdiff_t>(blocking));
        }
    }
}

// ---------------------------------------------------------------------------
// Lemke complementary pivoting, all-ones covering vector, lexicographic
// anti-cycling. Tableau columns: [w_0..w_{m-1} | l_0..l_{m-1} | z0 | rhs];
// the w block doubles as the running basis inverse for the lex comparisons.
// ---------------------------------------------------------------------------

namespace {

class LemkeTableau {
  public:
    LemkeTableau(const DenseMatrix& M, const DenseVector& q)
        : m_(M.rows()), t_(m_, std::vector<double>(2 * m_ + 2, 0.0)), basis_(m_) {
        for (std::size_t i = 0; i < m_; ++i) {
            t_[i][i] = 1.0;
            for (std::size_t j = 0; j < m_; ++j) t_[i][m_ + j] = -M(i, j);
            t_[i][z0_col()] = -1.0;
            t_[i][rhs_col()] = q[i];
            basis_[i] = i;
        }
    }

    std::size_t z0_col() const { return 2 * m_; }
    std::size_t rhs_col() const { return 2 * m_ + 1; }
    std::size_t basis(std::size_t row) const { return basis_[row]; }
    double rhs(std::size_t row) const { return t_[row][rhs_col()]; }

    void pivot(std::size_t row, std::size_t col) {
        const double piv = t_[row][col];
        for (double& v : t_[row]) v /= piv;
        t_[row][col] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = t_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < t_[i].size(); ++j) t_[i][j] -= f * t_[row][j];
            t_[i][col] = 0.0;
        }
        basis_[row] = col;
    }

    // Lexicographic minimum-ratio row for an entering column, or m_ if the
    // column has no positive entry (ray termination).
    std::size_t lex_leave_row(std::size_t col) const {
        const double piv_eps = 1e-11;
        std::size_t best = m_;
        for (std::size_t i = 0; i < m_; ++i) {
            if (t_[i][col] <= piv_eps) continue;
            if (best == m_) {
                best = i;
                continue;
            }
            const int cmp = lex_compare(i, best, col);
            if (cmp < 0) best = i;
            if (cmp == 0)
                throw PivotBreakdown("lcp_lemke: lexicographic tie not resolved");
        }
        return best;
    }

  private:
    // Compares rows a and b by the ratio vectors (rhs, w block) / pivot entry.
    int lex_compare(std::size_t a, std::size_t b, std::size_t col) const {
        const double da = t_[a][col], db = t_[b][col];
        auto cmp_at = [&](std::size_t j) -> int {
            const double va = t_[a][j] / da, vb = t_[b][j] / db;
            if (va < vb) return -1;
            if (va > vb) return 1;
            return 0;
        };
        if (int c = cmp_at(rhs_col()); c != 0) return c;
        for (std::size_t j = 0; j < m_; ++j)
            if (int c = cmp_at(j); c != 0) return c;
        return 0;
    }

    std::size_t m_;
    std::vector<std::vector<double>> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LcpSolve lcp_lemke(const LcpProblem& lcp, const SolverOptions& opts) {
    const std::size_t m = lcp.M.rows();
    if (lcp.M.cols() != m) throw DimensionMismatch("lcp_lemke: M not square");
    if (lcp.q_vec.size() != m) throw DimensionMismatch("lcp_lemke: q length mismatch");
    require_finite(lcp.M, "lcp_lemke M");
    require_finite(lcp.q_vec, "lcp_lemke q");

    LcpSolve out;
    out.lambda = DenseVector(m);

    double qmin = 0.0;
    std::size_t start_row = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (lcp.q_vec[i] <= qmin) {
            qmin = lcp.q_vec[i];
            start_row = i;
        }
    if (qmin >= 0.0) {
        out.status = LcpStatus::Solved;
        return out;
    }

    LemkeTableau tab(lcp.M, lcp.q_vec);

    // Entry pivot: z0 enters at the row with the most negative rhs; ties go
    // to the largest index, which keeps the remaining rows lex-positive.
    std::size_t leaving_var = tab.basis(start_row);
    tab.pivot(start_row, tab.z0_col());
    std::size_t entering = leaving_var + m;  // complement of the departed w

    const std::size_t cap = opts.lcp_iter_per_row * std::max<std::size_t>(m, 1);
    for (std::size_t it = 1;; ++it) {
        if (it > cap)
            throw IterationLimit("lcp_lemke: iteration cap " + std::to_string(cap) +
                                 " reached");
        const std::size_t row = tab.lex_leave_row(entering);
        if (row == m) {
            out.status = LcpStatus::RayTermination;
            out.iterations = it;
            return out;
        }
        leaving_var = tab.basis(row);
        tab.pivot(row, entering);

        if (leaving_var == tab.z0_col()) {
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t v = tab.basis(i);
                if (v >= m && v < 2 * m) out.lambda[v - m] = std::max(0.0, tab.rhs(i));
            }
            out.status = LcpStatus::Solved;
            out.iterations = it;
            return out;
        }
        entering = (leaving_var < m) ? leaving_var + m : leaving_var - m;
    }
}

SafeSolve lc_solve(const GeneralFormProblem& problem, const SolverOptions& opts) {
    const DenseMatrix& A = problem.A;
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    require_finite(A, "lc_solve A");
    require_finite(problem.b, "lc_solve b");

    const DenseMatrix H = g_operator(A, opts.eps_rank);
    const std::vector<double> rn = row_norms(A, opts.eps_rank, "lc_solve");

    // Symmetric rescaling: M' = D^{1/2} A A^T D^{1/2} with D = diag(1/|a_i|^2)
    // is the cosine Gram matrix of the rows; q' = D^{1/2} (-b).
    LcpProblem sym;
    sym.M = DenseMatrix(m, m);
    sym.q_vec = DenseVector(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double s = dot(A.row(i), A.row(j)) / (rn[i] * rn[j]);
            sym.M(i, j) = s;
            sym.M(j, i) = s;
        }
        sym.q_vec[i] = -problem.b[i] / rn[i];
    }

    LcpSolve ls = lcp_lemke(sym, opts);

    SafeSolve out;
    out.iterations = ls.iterations;
    out.x_star = DenseVector(n);
    out.lambda_star = DenseVector(m);
    out.lambda_lcp = DenseVector(m);
    if (ls.status == LcpStatus::RayTermination) {
        out.status = SolveStatus::Infeasible;
        return out;
    }

    // Re-solve the basic system on the support Lemke discovered; the pivot
    // tableau accumulates round-off that a direct solve does not.
    {
        std::vector<std::size_t> support;
        for (std::size_t i = 0; i < m; ++i)
            if (ls.lambda[i] > 0.0) support.push_back(i);
        if (!support.empty()) {
            const std::size_t k = support.size();
            DenseMatrix Mss(k, k);
            DenseVector rhs(k);
            for (std::size_t i = 0; i < k; ++i) {
                rhs[i] = -sym.q_vec[support[i]];
                for (std::size_t j = 0; j < k; ++j) Mss(i, j) = sym.M(support[i], support[j]);
            }
            try {
                const DenseVector refit = solve_linear(Mss, rhs, opts.eps_rank);
                DenseVector mu(m);
                bool nonneg = true;
                for (std::size_t i = 0; i < k; ++i) {
                    mu[support[i]] = refit[i];
                    nonneg = nonneg && refit[i] >= 0.0;
                }
                if (nonneg) {
                    auto quality = [&](const DenseVector& cand) {
                        const DenseVector w = add(matvec(sym.M, cand), sym.q_vec);
                        double w_min = 0.0, comp = 0.0;
                        for (std::size_t i = 0; i < m; ++i) {
                            w_min = std::min(w_min, w[i]);
                            comp = std::max(comp, std::abs(cand[i] * w[i]));
                        }
                        return std::pair<double, double>{w_min, comp};
                    };
                    const auto [w_min_new, comp_new] = quality(mu);
                    const auto [w_min_raw, comp_raw] = quality(ls.lambda);
                    if (w_min_new >= w_min_raw - 1e-12 && comp_new <= comp_raw)
                        ls.lambda = mu;
                }
            } catch (const SingularSystem&) {
                // degenerate support; keep the tableau values
            }
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        out.lambda_lcp[i] = rn[i] * ls.lambda[i];         // lambda = D^{-1/2} mu
        out.lambda_star[i] = out.lambda_lcp[i] / (rn[i] * rn[i]);
        if (out.lambda_lcp[i] > 0.0) out.active_set.push_back(i);
    }
    out.x_star = matvec(H, out.lambda_lcp);
    out.status = SolveStatus::Optimal;
    return out;
}

SingleConstraintSolution single_constraint_closed_form(double h, double a_dot_udes,
                                                       double tau, double delta) {
    if (!(tau > 0.0)) throw ConfigError("single_constraint_closed_form: tau must be > 0");
    const double s = h + tau * a_dot_udes - delta;
    if (s > 0.0) return {0.0, SingleConstraintCase::A};
    if (s == 0.0) return {0.0, SingleConstraintCase::B};
    return {-s / tau, SingleConstraintCase::C};
}

SafeSolve oracle_qp_enumerate(const GeneralFormProblem& problem, const SolverOptions& opts) {
    const DenseMatrix& A = problem.A;
    const DenseVector& b = problem.b;
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    if (m > 12)
        throw TooManyConstraints("oracle_qp_enumerate: m = " + std::to_string(m) +
                                 " exceeds the 2^m enumeration bound of 12");
    row_norms(A, opts.eps_rank, "oracle_qp_enumerate");

    const double feas_tol = 1e-9 * (1.0 + norm_inf(b));
    const double dual_tol = 1e-10;

    auto feasible = [&](const DenseVector& x) {
        for (std::size_t i = 0; i < m; ++i)
            if (dot(A.row(i), x) - b[i] < -feas_tol) return false;
        return true;
    };

    bool any_feasible = false;
    bool have_best = false;
    double best_cost = kInf;
    DenseVector best_x(n), best_lambda(m);
    std::vector<std::size_t> best_active;

    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<std::size_t> S;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1u << i)) S.push_back(i);

        DenseVector x(n), lamS;
        if (S.empty()) {
            // x = 0 candidate
        } else {
            const std::size_t k = S.size();
            DenseMatrix G(k, k);
            DenseVector rhs(k);
            for (std::size_t i = 0; i < k; ++i) {
                rhs[i] = b[S[i]];
                for (std::size_t j = i; j < k; ++j) {
                    const double s = dot(A.row(S[i]), A.row(S[j]));
                    G(i, j) = s;
                    G(j, i) = s;
                }
            }
            try {
                lamS = solve_linear(G, rhs, opts.eps_rank);
            } catch (const SingularSystem&) {
                continue;  // dependent subset; an independent one covers it
            }
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t c = 0; c < n; ++c) x[c] += lamS[i] * A(S[i], c);
        }

        if (!feasible(x)) continue;
        any_feasible = true;

        bool dual_ok = true;
        for (std::size_t i = 0; i < lamS.size(); ++i)
            if (lamS[i] < -dual_tol) dual_ok = false;
        if (!dual_ok) continue;

        const double cost = 0.5 * dot(x, x);
        if (!have_best || cost < best_cost) {
            have_best = true;
            best_cost = cost;
            best_x = x;
            best_lambda = DenseVector(m);
            for (std::size_t i = 0; i < S.size(); ++i)
                best_lambda[S[i]] = std::max(0.0, lamS[i]);
            best_active = S;
        }
    }

    SafeSolve out;
    out.x_star = DenseVector(n);
    out.lambda_star = DenseVector(m);
    if (have_best) {
        out.status = SolveStatus::Optimal;
        out.x_star = best_x;
        out.lambda_star = best_lambda;
        out.active_set = best_active;
    } else if (!any_feasible) {
        out.status = SolveStatus::Infeasible;
    } else {
        // A feasible point exists but no subset produced a KKT candidate;
        // with exact arithmetic this is impossible for this problem class.
        throw Error("oracle_qp_enumerate: feasible instance without KKT candidate");
    }
    return out;
}

std::vector<DenseVector> oracle_lcp_enumerate(const LcpProblem& lcp,
                                              const SolverOptions& opts) {
    const std::size_t m = lcp.M.rows();
    if (lcp.M.cols() != m || lcp.q_vec.size() != m)
        throw DimensionMismatch("oracle_lcp_enumerate: dimension mismatch");
    if (m > 12)
        throw TooManyConstraints("oracle_lcp_enumerate: m exceeds enumeration bound");

    const double tol = 1e-10;
    std::vector<DenseVector> solutions;

    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<std::size_t> S;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1u << i)) S.push_back(i);

        DenseVector lambda(m);
        if (!S.empty()) {
            const std::size_t k = S.size();
            DenseMatrix Mss(k, k);
            DenseVector rhs(k);
            for (std::size_t i = 0; i < k; ++i) {
                rhs[i] = -lcp.q_vec[S[i]];
                for (std::size_t j = 0; j < k; ++j) Mss(i, j) = lcp.M(S[i], S[j]);
            }
            DenseVector lamS;
            try {
                lamS = solve_linear(Mss, rhs, opts.eps_rank);
            } catch (const SingularSystem&) {
                continue;
            }
            for (std::size_t i = 0; i < k; ++i) lambda[S[i]] = lamS[i];
        }

        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i)
            if (lambda[i] < -tol) ok = false;
        if (!ok) continue;
        // Complementarity on S holds by construction (w_S = 0).
        const DenseVector w = add(matvec(lcp.M, lambda), lcp.q_vec);
        for (std::size_t i = 0; i < m && ok; ++i)
            if (w[i] < -tol) ok = false;
        if (ok) solutions.push_back(lambda);
    }
    return solutions;
}

KktResiduals kkt_residuals(const GeneralFormProblem& problem, const DenseVector& x,
                           const DenseVector& lambda) {
    const DenseMatrix& A = problem.A;
    const std::size_t m = A.rows();
    const std::size_t n = A.cols();
    if (x.size() != n || lambda.size() != m)
        throw DimensionMismatch("kkt_residuals: dimension mismatch");

    KktResiduals res;
    DenseVector grad = x;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < n; ++c) grad[c] -= lambda[i] * A(i, c);
    res.stationarity = norm(grad);

    res.dual_min = kInf;
    res.primal_min = kInf;
    for (std::size_t i = 0; i < m; ++i) {
        const double margin = dot(A.row(i), x) - problem.b[i];
        res.complementarity = std::max(res.complementarity, std::abs(lambda[i] * margin));
        res.dual_min = std::min(res.dual_min, lambda[i]);
        res.primal_min = std::min(res.primal_min, margin);
    }
    return res;
}

}  // namespace safewb
