#include "safewb/simulate.hpp"

#include <cmath>

#include "doctest.h"

using namespace safewb;

namespace {

const RobotModel kArm{{0.1, 0.05, 0.05}, {0.0, 0.0}};

SimConfig validation_scene() {
    SimConfig cfg;
    cfg.model = kArm;
    cfg.obstacles = {{{0.03, 0.17}, 0.05}};
    cfg.q0.q = DenseVector{1.1, -0.4, -0.3};
    cfg.goal = {-0.05, 0.15};
    cfg.k_p = 0.05;
    cfg.tau = 0.005;
    cfg.delta = DenseVector{0.01, 0.01, 0.01};
    cfg.kappa_gain = 0.0;  // 1/tau
    cfg.max_steps = 20000;
    cfg.goal_tol = 1e-3;
    cfg.controller = ControllerChoice::Both;
    return cfg;
}

}  // namespace

TEST_CASE("desired velocity follows the unit-direction policy") {
    SUBCASE("direction scaling") {
        // 2-link arm in general position; goal offset (3,4) from the end
        // effector gives v_des = k_p (0.6, 0.8)
        const RobotModel two{{1.0, 0.8}, {0.0, 0.0}};
        const JointState q{DenseVector{0.3, 0.4}};
        const auto pts = forward_kinematics(two, q);
        const Vec2 goal{pts.back()[0] + 3.0, pts.back()[1] + 4.0};
        const DenseVector u = desired_velocity(two, q, goal, 1.0);
        const DenseMatrix J = end_effector_jacobian(two, q);
        const DenseVector v = matvec(J, u);
        CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-9));
    }
    SUBCASE("single link tangent motion") {
        const RobotModel one{{1.0}, {0.0, 0.0}};
        const JointState q{DenseVector{0.0}};
        const DenseVector u = desired_velocity(one, q, {1.0, 0.5}, 0.3);
        REQUIRE(u.size() == 1);
        CHECK(u[0] == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("least-squares residual vanishes at full row rank") {
        Rng rng(61);
        for (int trial = 0; trial < 100; ++trial) {
            DenseVector q(3);
            for (int j = 0; j < 3; ++j) q[j] = rng.uniform(-2.5, 2.5);
            // skip near-singular arm poses (stretched/folded)
            const DenseMatrix J = end_effector_jacobian(kArm, {q});
            DenseVector u;
            try {
                u = desired_velocity(kArm, {q}, {-0.05, 0.15}, 0.05);
            } catch (const SingularJacobian&) {
                continue;
            }
            const auto pts = forward_kinematics(kArm, {q});
            const double dx = -0.05 - pts.back()[0], dy = 0.15 - pts.back()[1];
            const double d = std::hypot(dx, dy);
            const DenseVector v = matvec(J, u);
            CHECK(std::abs(v[0] - 0.05 * dx / d) < 1e-9);
            CHECK(std::abs(v[1] - 0.05 * dy / d) < 1e-9);
        }
    }
    SUBCASE("stretched arm signals a singular Jacobian") {
        CHECK_THROWS_AS(
            desired_velocity(kArm, {DenseVector{0.0, 0.0, 0.0}}, {0.5, 0.0}, 0.05),
            SingularJacobian);
    }
}

TEST_CASE("step passes u_des through when constraints are slack") {
    SimConfig cfg = validation_scene();
    // Far away, placed so no link's closest point collapses onto the base
    // pivot (which would zero that gradient row and abort assembly).
    cfg.obstacles = {{{-5.0, 5.0}, 0.05}};
    const JointState q{DenseVector{1.1, -0.4, -0.3}};
    const StepResult res = step(cfg, q, 0);
    CHECK(res.record.e == 0.0);
    const DenseVector u_des = desired_velocity(cfg.model, q, cfg.goal, cfg.k_p);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(res.record.u_cbf[j] == u_des[j]);
        CHECK(res.record.u_lc[j] == u_des[j]);
        CHECK(res.next.q[j] == doctest::Approx(q.q[j] + cfg.tau * u_des[j]));
    }
}

TEST_CASE("run with remote obstacle drives straight and reaches the goal") {
    SimConfig cfg = validation_scene();
    cfg.obstacles = {{{-5.0, 5.0}, 0.05}};
    const auto [log, metrics] = run(cfg);
    CHECK(log.termination == Termination::GoalReached);
    CHECK(metrics.goal_error <= cfg.goal_tol);
    CHECK(metrics.e_max == 0.0);
    CHECK(metrics.hprime_min > 0.0);

    // end-effector path heads straight for the goal (ZOH leaves tiny bow)
    const auto& mid = log.steps[log.steps.size() / 2];
    const auto pts = forward_kinematics(cfg.model, {mid.q});
    const auto p0 = forward_kinematics(cfg.model, {log.steps.front().q}).back();
    const double cross = (pts.back()[0] - p0[0]) * (cfg.goal[1] - p0[1]) -
                         (pts.back()[1] - p0[1]) * (cfg.goal[0] - p0[0]);
    CHECK(std::abs(cross) < 1e-4);
}

TEST_CASE("validation scene: safe, goal reached, controllers agree") {
    const SimConfig cfg = validation_scene();
    const auto [log, metrics] = run(cfg);
    REQUIRE(log.termination == Termination::GoalReached);
    CHECK(metrics.goal_error <= cfg.goal_tol);
    CHECK(metrics.hprime_min > 0.0);
    CHECK(metrics.e_max <= 1e-8);
    CHECK(metrics.e_min >= 0.0);
    CHECK(metrics.e_min <= metrics.e_mean);
    CHECK(metrics.e_mean <= metrics.e_max);

    // KKT residuals stayed certified along the whole trajectory
    for (const StepRecord& r : log.steps) {
        CHECK(r.kkt_stationarity <= 1e-8);
        CHECK(r.kkt_complementarity <= 1e-8);
        CHECK(r.kkt_dual_min >= -1e-10);
        CHECK(r.kkt_primal_min >= -1e-8);
    }
}

TEST_CASE("controller choice selects the applied input") {
    SimConfig cfg = validation_scene();
    cfg.max_steps = 400;  // enough to engage the obstacle
    cfg.controller = ControllerChoice::LC;
    const auto [log, metrics] = run(cfg);
    REQUIRE(!log.steps.empty());
    bool engaged = false;
    for (const StepRecord& r : log.steps) {
        for (std::size_t j = 0; j < r.u_applied.size(); ++j)
            CHECK(r.u_applied[j] == r.u_lc[j]);
        if (r.hprime < 1e-4) engaged = true;
    }
    CHECK(engaged);
    CHECK(metrics.hprime_min > 0.0);
}

TEST_CASE("two runs are bitwise identical") {
    const SimConfig cfg = validation_scene();
    const auto [log_a, metrics_a] = run(cfg);
    const auto [log_b, metrics_b] = run(cfg);
    REQUIRE(log_a.steps.size() == log_b.steps.size());
    for (std::size_t k = 0; k < log_a.steps.size(); ++k) {
        const StepRecord& a = log_a.steps[k];
        const StepRecord& b = log_b.steps[k];
        for (std::size_t j = 0; j < a.q.size(); ++j) {
            CHECK(a.q[j] == b.q[j]);
            CHECK(a.u_cbf[j] == b.u_cbf[j]);
            CHECK(a.u_lc[j] == b.u_lc[j]);
        }
        CHECK(a.e == b.e);
        CHECK(a.hprime == b.hprime);
    }
    CHECK(metrics_a.hprime_min == metrics_b.hprime_min);
    CHECK(metrics_a.e_max == metrics_b.e_max);
}

TEST_CASE("u_des = 0 would hold the state; goal tolerance stops the run") {
    SimConfig cfg = validation_scene();
    // place the goal at the current end effector: run terminates immediately
    const auto pts = forward_kinematics(cfg.model, cfg.q0);
    cfg.goal = {pts.back()[0], pts.back()[1]};
    const auto [log, metrics] = run(cfg);
    CHECK(log.termination == Termination::GoalReached);
    CHECK(log.steps.empty());
    CHECK(metrics.steps == 0);
}

TEST_CASE("margin larger than initial clearance: repulsion phase is logged") {
    SimConfig cfg = validation_scene();
    // q0's closest link sits ~0.029 m from the disk; demand 0.05
    for (std::size_t i = 0; i < cfg.delta.size(); ++i) cfg.delta[i] = 0.05;
    const auto [log, metrics] = run(cfg);
    REQUIRE(!log.steps.empty());
    CHECK(log.steps.front().hprime < 0.0);  // starts inside the margin
    CHECK(metrics.hprime_min < 0.0);
    // the filter pushes outward: the margin improves over the run
    CHECK(log.steps.back().hprime > log.steps.front().hprime);
}

TEST_CASE("discretization consistency: geometric h tracks the linear model") {
    const SimConfig cfg = validation_scene();
    const auto [log, metrics] = run(cfg);
    REQUIRE(log.termination == Termination::GoalReached);

    const double L = cfg.model.total_length();
    const double r_min = 0.05;
    for (std::size_t k = 0; k + 1 < log.steps.size(); ++k) {
        const StepRecord& cur = log.steps[k];
        const StepRecord& nxt = log.steps[k + 1];
        const auto pairs = all_contact_pairs(cfg.model, {cur.q}, cfg.obstacles);
        double u1 = 0.0;
        for (std::size_t j = 0; j < cur.u_applied.size(); ++j)
            u1 += std::abs(cur.u_applied[j]);
        const double C = 20.0 * (L + L * L / r_min) * std::max(1.0, u1 * u1);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const double predicted =
                cur.h[i] + cfg.tau * dot(pairs[i].jac_row, cur.u_applied);
            CHECK(std::abs(nxt.h[i] - predicted) <= C * cfg.tau * cfg.tau);
        }
    }
}

TEST_CASE("fuzz harness seed-42 contract") {
    FuzzConfig cfg;  // defaults: seed 42, 1000 instances, m<=8, n<=10, tol 1e-8
    cfg.instances = 200;
    const FuzzReport rep = fuzz_equivalence(cfg);
    CHECK(rep.success);
    CHECK(rep.instances_run == 200);
    CHECK(rep.status_disagreements == 0);
}

TEST_CASE("fuzz harness flags degenerate generator output") {
    FuzzConfig cfg;
    cfg.instances = 200;
    cfg.min_row_norm = 0.0;  // loosened generator injects exact zero rows
    const FuzzReport rep = fuzz_equivalence(cfg);
    CHECK(rep.generator_contract_violation);
    CHECK(!rep.success);
}

TEST_CASE("a vanished gradient row surfaces as SolverFailure with partial log") {
    SimConfig cfg = validation_scene();
    // From this start the arm swings until link 0's closest point collapses
    // onto the base pivot, where the constraint gradient is exactly zero.
    cfg.obstacles = {{{5.0, 5.0}, 0.05}};
    const auto [log, metrics] = run(cfg);
    CHECK(log.termination == Termination::SolverFailure);
    CHECK(!log.failure_reason.empty());
    CHECK(!log.steps.empty());  // partial log retained
    CHECK(metrics.steps == log.steps.size());
}

TEST_CASE("config validation rejects bad scenes") {
    SimConfig cfg = validation_scene();
    cfg.model.link_lengths[1] = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = validation_scene();
    cfg.obstacles.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = validation_scene();
    cfg.delta = DenseVector{0.01};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = validation_scene();
    cfg.tau = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
