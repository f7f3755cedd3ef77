#pragma once

// Builds the shared general-form problem (A, b) that both the
// complementarity controller and the CBF controller constrain against,
// in shifted coordinates x = u - u_des:
//
//   row i of A = d h_i / d q
//   b_i (LC)   = (delta_i - h_i) / tau - A_i . u_des
//   b_i (CBF)  = gain * (delta_i - h_i) - A_i . u_des
//
// With gain = 1/tau and equal margins the two kinds produce identical b.

#include <cstddef>
#include <vector>

#include "safewb/numkit.hpp"
#include "safewb/planar_robot.hpp"

namespace safewb {

enum class MarginKind { LC, CBF };

struct MarginSpec {
    DenseVector delta;  // meters, one entry per constraint, all >= 0
    MarginKind kind = MarginKind::CBF;
};

// Linear class-kappa map alpha(x) = gain * x. Only linear maps are
// supported; the LC/CBF correspondence is exact for gain = 1/tau.
struct KappaMap {
    double gain = 1.0;  // 1/seconds, > 0
};

struct GeneralFormProblem {
    DenseMatrix A;      // m x n, rows are constraint gradients
    DenseVector b;      // m
    double tau = 0.0;   // seconds
    DenseVector u_des;  // n, rad/s
    DenseVector h;      // m, meters (signed distances at assembly time)

    std::size_t num_constraints() const { return A.rows(); }
    std::size_t dim() const { return A.cols(); }
};

// Assembles (A, b) from per-pair contact data. Throws DegenerateRow if any
// gradient row vanished (a silently dropped constraint could mask an unsafe
// state), DimensionMismatch on inconsistent sizes.
GeneralFormProblem assemble(const std::vector<ContactPair>& pairs,
                            const DenseVector& u_des, double tau,
                            const MarginSpec& margins, const KappaMap& kappa,
                            double eps_rank = kEpsRank);

// Convenience overload: computes the contact pairs for every
// (obstacle, link) pair of the scene, obstacle-major order.
GeneralFormProblem assemble(const RobotModel& model, const JointState& state,
                            const std::vector<DiskObstacle>& obstacles,
                            const DenseVector& u_des, double tau,
                            const MarginSpec& margins, const KappaMap& kappa,
                            double eps_rank = kEpsRank);

std::vector<ContactPair> all_contact_pairs(const RobotModel& model,
                                           const JointState& state,
                                           const std::vector<DiskObstacle>& obstacles,
                                           double eps_rank = kEpsRank);

// A*x - b. Entrywise >= -tol certifies feasibility of x.
DenseVector feasibility_margin(const GeneralFormProblem& problem, const DenseVector& x);

}  // namespace safewb
