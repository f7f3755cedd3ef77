#pragma once

// Two independent solution paths for the same general-form problem
//
//   min 1/2 ||x||^2   subject to   A x >= b
//
// and its complementarity restatement
//
//   x = H lambda,  0 <= lambda  perp  A H lambda - b >= 0,   H = g_operator(A).
//
// qp_min_norm attacks the first form with a dual active-set iteration
// starting from x = 0; lc_solve attacks the second with Lemke complementary
// pivoting on a diagonally rescaled symmetric LCP. The two share no solver
// machinery, which is what makes cross-checking them meaningful. Brute-force
// subset enumeration oracles are provided for both forms.

#include <cstddef>
#include <vector>

#include "safewb/constraints.hpp"
#include "safewb/numkit.hpp"

namespace safewb {

enum class SolveStatus { Optimal, Infeasible, Degenerate };
enum class LcpStatus { Solved, RayTermination };

struct SafeSolve {
    DenseVector x_star;       // minimizer, in x = u - u_des coordinates
    DenseVector lambda_star;  // KKT multipliers of the QP form, >= 0
    DenseVector lambda_lcp;   // complementarity-scale multipliers
                              // (lambda_lcp_i = ||a_i||^2 * lambda_star_i);
                              // filled by lc_solve, empty otherwise
    std::vector<std::size_t> active_set;
    SolveStatus status = SolveStatus::Degenerate;
    std::size_t iterations = 0;
};

struct LcpProblem {
    DenseMatrix M;      // m x m
    DenseVector q_vec;  // m; a solution satisfies 0 <= lambda perp M lambda + q_vec >= 0
};

struct LcpSolve {
    DenseVector lambda;
    LcpStatus status = LcpStatus::RayTermination;
    std::size_t iterations = 0;
};

struct SolverOptions {
    double eps_rank = kEpsRank;
    double feas_tol_scale = 1e-10;     // termination slack, scaled by (1 + |b|_inf)
    std::size_t qp_iter_per_row = 100;  // iteration cap = this * m
    std::size_t lcp_iter_per_row = 200;
};

// Dual active-set projection of the origin onto {x : A x >= b}. Starts at
// x = 0 and repeatedly brings in the most violated constraint (ties to the
// lowest index). Reports Infeasible when the multiplier phase is unbounded.
SafeSolve qp_min_norm(const GeneralFormProblem& problem, const SolverOptions& opts = {});

// Lemke's algorithm with the all-ones covering vector and lexicographic
// tie resolution.
LcpSolve lcp_lemke(const LcpProblem& lcp, const SolverOptions& opts = {});

// Complementarity path: forms H = g_operator(A), rescales the LCP
// (A H, -b) to its symmetric similar form, solves with lcp_lemke and maps
// back through H. Ray termination is reported as Infeasible.
SafeSolve lc_solve(const GeneralFormProblem& problem, const SolverOptions& opts = {});

enum class SingleConstraintCase { A, B, C };

struct SingleConstraintSolution {
    double lambda_star = 0.0;  // complementarity-scale multiplier, >= 0
    SingleConstraintCase which = SingleConstraintCase::A;
};

// Closed form for one constraint: with s = h + tau * a_dot_udes - delta,
//   s > 0 -> (0, A),  s = 0 -> (0, B),  s < 0 -> (-s/tau, C).
SingleConstraintSolution single_constraint_closed_form(double h, double a_dot_udes,
                                                       double tau, double delta);

// Brute-force oracle: enumerates every active subset of constraints, keeps
// primal-feasible candidates with nonnegative multipliers, returns the
// minimum-norm one. m <= 12.
SafeSolve oracle_qp_enumerate(const GeneralFormProblem& problem,
                              const SolverOptions& opts = {});

// Brute-force oracle: enumerates complementarity pieces of the LCP and
// returns every solution found. m <= 12.
std::vector<DenseVector> oracle_lcp_enumerate(const LcpProblem& lcp,
                                              const SolverOptions& opts = {});

struct KktResiduals {
    double stationarity = 0.0;     // ||x - A^T lambda||
    double complementarity = 0.0;  // max_i |lambda_i (A x - b)_i|
    double dual_min = 0.0;         // min_i lambda_i
    double primal_min = 0.0;       // min_i (A x - b)_i
};

// Residuals of the four KKT conditions at (x, lambda), QP-scale lambda.
KktResiduals kkt_residuals(const GeneralFormProblem& problem, const DenseVector& x,
                           const DenseVector& lambda);

}  // namespace safewb
