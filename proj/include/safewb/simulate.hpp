#pragma once

// Zero-order-hold closed-loop simulation of the velocity-controlled planar
// arm. Both formulations are solved from the same state at every step; the
// configured one drives the integration, and the per-step disagreement
// e_k = ||u_LC - u_CBF|| is logged. Also hosts the randomized equivalence
// harness used by the fuzz command and the acceptance suite.

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "safewb/constraints.hpp"
#include "safewb/planar_robot.hpp"
#include "safewb/solvers.hpp"

namespace safewb {

enum class ControllerChoice { CBF, LC, Both };  // Both applies the CBF input
enum class Termination { GoalReached, MaxSteps, SolverFailure };

struct SimConfig {
    RobotModel model;
    std::vector<DiskObstacle> obstacles;
    JointState q0;
    Vec2 goal{0.0, 0.0};
    double k_p = 0.05;        // m/s, speed of the unit-direction policy
    double tau = 0.005;       // s
    DenseVector delta;        // margins, one entry per (obstacle, link) pair
    double kappa_gain = 0.0;  // 1/s; 0 means "use 1/tau"
    std::size_t max_steps = 20000;
    double goal_tol = 1e-3;   // m
    ControllerChoice controller = ControllerChoice::Both;

    std::size_t num_constraints() const {
        return obstacles.size() * model.num_links();
    }
    double effective_kappa_gain() const { return kappa_gain > 0.0 ? kappa_gain : 1.0 / tau; }
    void validate() const;  // throws ConfigError
};

struct StepRecord {
    std::size_t k = 0;
    DenseVector q;
    DenseVector u_cbf;
    DenseVector u_lc;
    DenseVector u_applied;
    DenseVector h;          // signed distances, one per constraint
    double hprime = 0.0;    // min_i (h_i - delta_i)
    double e = 0.0;         // ||u_lc - u_cbf||
    // Worst KKT residuals over the two solves at this step (not serialized).
    double kkt_stationarity = 0.0;
    double kkt_complementarity = 0.0;
    double kkt_dual_min = 0.0;
    double kkt_primal_min = 0.0;
};

struct TrajectoryLog {
    std::vector<StepRecord> steps;
    Termination termination = Termination::MaxSteps;
    std::string failure_reason;  // set on SolverFailure
};

struct RunMetrics {
    double e_min = 0.0;
    double e_mean = 0.0;
    double e_max = 0.0;
    double hprime_min = 0.0;
    std::size_t steps = 0;
    double goal_error = 0.0;
};

// u_des = pinv(J_ee) * k_p * unit(goal - p_ee). Throws SingularJacobian when
// the end-effector Jacobian loses row rank at the tolerance.
DenseVector desired_velocity(const RobotModel& model, const JointState& state,
                             const Vec2& goal, double k_p, double eps_rank = kEpsRank);

// One ZOH step from q_k: solve both controllers, apply the configured one,
// integrate q_{k+1} = q_k + tau * u_k. Solver errors surface as exceptions;
// run() converts them into a SolverFailure termination.
struct StepResult {
    JointState next;
    StepRecord record;
};
StepResult step(const SimConfig& config, const JointState& q_k, std::size_t k);

std::pair<TrajectoryLog, RunMetrics> run(const SimConfig& config);

// --- Randomized solver-equivalence harness ---------------------------------

// Deterministic, platform-independent generator (splitmix64).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform(double lo, double hi);
    std::size_t uniform_index(std::size_t lo, std::size_t hi);  // inclusive

  private:
    std::uint64_t state_;
};

struct FuzzConfig {
    std::uint64_t seed = 42;
    std::size_t instances = 1000;
    std::size_t m_max = 8;
    std::size_t n_max = 10;
    double tol = 1e-8;
    std::size_t oracle_m_max = 6;  // enumeration oracle engaged up to here
    double min_row_norm = 0.1;     // generator rejects weaker rows; below
                                   // eps_rank it injects exact zero rows
};

struct FuzzFailure {
    std::size_t index = 0;
    std::string kind;
    std::string detail;
};

struct FuzzReport {
    std::size_t instances_run = 0;
    std::size_t oracle_checked = 0;
    std::size_t infeasible_count = 0;
    double max_solver_discrepancy = 0.0;  // |x_qp - x_lc| / (1 + |x|)
    double max_oracle_discrepancy = 0.0;
    double max_stationarity = 0.0;
    double max_complementarity = 0.0;
    double min_dual = 0.0;
    double min_primal_margin = 0.0;
    std::size_t status_disagreements = 0;
    bool generator_contract_violation = false;
    std::vector<FuzzFailure> failures;  // capped at 32 entries
    bool success = false;
};

// Random general-form instance; rows mix plain draws, duplicated rows and
// b <= 0 shifts. Used by fuzz_equivalence and the acceptance suite.
GeneralFormProblem random_general_form(Rng& rng, const FuzzConfig& cfg);

FuzzReport fuzz_equivalence(const FuzzConfig& cfg);

}  // namespace safewb
