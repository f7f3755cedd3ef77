#include "safewb/planar_robot.hpp"

#include <cmath>

#include "doctest.h"
#include "safewb/simulate.hpp"  // Rng

using namespace safewb;

namespace {

const RobotModel kArm{{0.1, 0.05, 0.05}, {0.0, 0.0}};
constexpr double kPi = 3.14159265358979323846;

JointState angles(std::initializer_list<double> q) { return {DenseVector(q)}; }

double seg_h(const RobotModel& model, const JointState& s, std::size_t link,
             const DiskObstacle& obs) {
    return closest_pair(model, s, link, obs).h;
}

}  // namespace

TEST_CASE("forward kinematics at reference poses") {
    auto pts = forward_kinematics(kArm, angles({0, 0, 0}));
    REQUIRE(pts.size() == 4);
    CHECK(pts[0][0] == 0.0);
    CHECK(pts[1][0] == doctest::Approx(0.1));
    CHECK(pts[2][0] == doctest::Approx(0.15));
    CHECK(pts[3][0] == doctest::Approx(0.2));
    for (const auto& p : pts) CHECK(std::abs(p[1]) < 1e-15);

    pts = forward_kinematics(kArm, angles({kPi / 2, 0, 0}));
    CHECK(pts[1][1] == doctest::Approx(0.1));
    CHECK(pts[2][1] == doctest::Approx(0.15));
    CHECK(pts[3][1] == doctest::Approx(0.2));
    for (const auto& p : pts) CHECK(std::abs(p[0]) < 1e-12);

    const RobotModel one{{1.0}, {0.0, 0.0}};
    pts = forward_kinematics(one, angles({kPi}));
    CHECK(pts[1][0] == doctest::Approx(-1.0));
    CHECK(std::abs(pts[1][1]) < 1e-12);

    CHECK_THROWS_AS(forward_kinematics(kArm, angles({0, 0})), DimensionMismatch);
}

TEST_CASE("end effector jacobian") {
    const DenseMatrix J = end_effector_jacobian(kArm, angles({0, 0, 0}));
    CHECK(J(0, 0) == doctest::Approx(0.0));
    CHECK(J(0, 1) == doctest::Approx(0.0));
    CHECK(J(0, 2) == doctest::Approx(0.0));
    CHECK(J(1, 0) == doctest::Approx(0.2));
    CHECK(J(1, 1) == doctest::Approx(0.1));
    CHECK(J(1, 2) == doctest::Approx(0.05));

    const RobotModel one{{1.0}, {0.0, 0.0}};
    const DenseMatrix J1 = end_effector_jacobian(one, angles({0}));
    CHECK(J1(0, 0) == doctest::Approx(0.0));
    CHECK(J1(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("end effector jacobian matches finite differences") {
    Rng rng(5);
    const double step = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        DenseVector q(3);
        for (int j = 0; j < 3; ++j) q[j] = rng.uniform(-kPi, kPi);
        const DenseMatrix J = end_effector_jacobian(kArm, {q});
        for (std::size_t j = 0; j < 3; ++j) {
            DenseVector qp = q, qm = q;
            qp[j] += step;
            qm[j] -= step;
            const auto pp = forward_kinematics(kArm, {qp}).back();
            const auto pm = forward_kinematics(kArm, {qm}).back();
            CHECK(std::abs((pp[0] - pm[0]) / (2 * step) - J(0, j)) < 1e-6);
            CHECK(std::abs((pp[1] - pm[1]) / (2 * step) - J(1, j)) < 1e-6);
        }
    }
}

TEST_CASE("point jacobian") {
    const DenseMatrix Jee = point_jacobian(kArm, angles({0, 0, 0}), 2, {0.2, 0.0});
    CHECK(Jee(1, 0) == doctest::Approx(0.2));
    CHECK(Jee(1, 1) == doctest::Approx(0.1));
    CHECK(Jee(1, 2) == doctest::Approx(0.05));

    const DenseMatrix J0 = point_jacobian(kArm, angles({0, 0, 0}), 0, {0.05, 0.0});
    CHECK(J0(1, 0) == doctest::Approx(0.05));
    CHECK(J0(0, 1) == 0.0);
    CHECK(J0(1, 1) == 0.0);
    CHECK(J0(1, 2) == 0.0);

    CHECK_THROWS_AS(point_jacobian(kArm, angles({0, 0, 0}), 0, {0.05, 0.1}), PointOffLink);

    // chain consistency: the end-effector Jacobian is the point Jacobian at
    // the tip of the last link
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        DenseVector q(3);
        for (int j = 0; j < 3; ++j) q[j] = rng.uniform(-2.5, 2.5);
        const auto pts = forward_kinematics(kArm, {q});
        const DenseMatrix A = end_effector_jacobian(kArm, {q});
        const DenseMatrix B = point_jacobian(kArm, {q}, 2, pts.back());
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 3; ++c) CHECK(A(r, c) == doctest::Approx(B(r, c)));
    }
}

TEST_CASE("point jacobian at a link midpoint matches finite differences") {
    Rng rng(23);
    const double step = 1e-6;
    for (int trial = 0; trial < 30; ++trial) {
        DenseVector q(3);
        for (int j = 0; j < 3; ++j) q[j] = rng.uniform(-2.0, 2.0);
        const double t_mid = 0.5;
        auto point_of = [&](const DenseVector& qq) {
            const auto pts = forward_kinematics(kArm, {qq});
            return Vec2{pts[1][0] + t_mid * (pts[2][0] - pts[1][0]),
                        pts[1][1] + t_mid * (pts[2][1] - pts[1][1])};
        };
        const Vec2 p = point_of(q);
        const DenseMatrix J = point_jacobian(kArm, {q}, 1, p);
        for (std::size_t j = 0; j < 3; ++j) {
            DenseVector qp = q, qm = q;
            qp[j] += step;
            qm[j] -= step;
            const Vec2 pp = point_of(qp), pm = point_of(qm);
            CHECK(std::abs((pp[0] - pm[0]) / (2 * step) - J(0, j)) < 1e-6);
            CHECK(std::abs((pp[1] - pm[1]) / (2 * step) - J(1, j)) < 1e-6);
        }
    }
}

TEST_CASE("closest_pair geometry") {
    const RobotModel seg{{1.0}, {0.0, 0.0}};  // segment (0,0)-(1,0) at q=0
    const JointState q0 = angles({0});

    SUBCASE("perpendicular foot") {
        const ContactPair p = closest_pair(seg, q0, 0, {{0.5, 0.3}, 0.1});
        CHECK(p.p_c[0] == doctest::Approx(0.5));
        CHECK(p.p_c[1] == doctest::Approx(0.0));
        CHECK(p.h == doctest::Approx(0.2));
        CHECK(p.normal[0] == doctest::Approx(0.0));
        CHECK(p.normal[1] == doctest::Approx(-1.0));
        CHECK(p.p_o[0] == doctest::Approx(0.5));
        CHECK(p.p_o[1] == doctest::Approx(0.2));
    }
    SUBCASE("endpoint case") {
        const ContactPair p = closest_pair(seg, q0, 0, {{2.0, 0.0}, 0.5});
        CHECK(p.p_c[0] == doctest::Approx(1.0));
        CHECK(p.h == doctest::Approx(0.5));
        CHECK(p.normal[0] == doctest::Approx(-1.0));
        CHECK(p.normal[1] == doctest::Approx(0.0));
    }
    SUBCASE("penetration is signed") {
        const ContactPair p = closest_pair(seg, q0, 0, {{0.5, 0.05}, 0.1});
        CHECK(p.h == doctest::Approx(-0.05));
    }
    SUBCASE("center on the segment is degenerate") {
        CHECK_THROWS_AS(closest_pair(seg, q0, 0, {{0.5, 0.0}, 0.1}), DegenerateNormal);
    }
}

TEST_CASE("contact pair invariants on random configurations") {
    Rng rng(31);
    const DiskObstacle obs{{0.03, 0.17}, 0.05};
    for (int trial = 0; trial < 200; ++trial) {
        DenseVector q(3);
        for (int j = 0; j < 3; ++j) q[j] = rng.uniform(-kPi, kPi);
        for (std::size_t link = 0; link < 3; ++link) {
            const ContactPair p = closest_pair(kArm, {q}, link, obs);
            const double nlen = std::hypot(p.normal[0], p.normal[1]);
            CHECK(std::abs(nlen - 1.0) < 1e-10);
            if (p.h > 1e-10) {
                const double dx = p.p_c[0] - p.p_o[0], dy = p.p_c[1] - p.p_o[1];
                const double d = std::hypot(dx, dy);
                CHECK(std::abs(dx / d - p.normal[0]) < 1e-10);
                CHECK(std::abs(dy / d - p.normal[1]) < 1e-10);
            }
            if (p.h >= 0.0) {
                // p_o sits on the disk surface toward p_c
                const double ox = p.p_o[0] - obs.center[0], oy = p.p_o[1] - obs.center[1];
                CHECK(std::abs(std::hypot(ox, oy) - obs.radius) < 1e-10);
            }
        }
    }
}

TEST_CASE("gradient identity: finite differences of h match jac_row") {
    Rng rng(47);
    const DiskObstacle obs{{0.03, 0.17}, 0.05};
    const double step = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 300 && checked < 150; ++trial) {
        DenseVector q(3);
        for (int j = 0; j < 3; ++j) q[j] = rng.uniform(-kPi, kPi);
        for (std::size_t link = 0; link < 3; ++link) {
            const ContactPair p = closest_pair(kArm, {q}, link, obs);
            // skip configurations where the closest point is about to switch
            // between segment interior and an endpoint
            const SegmentClosest foot = closest_point_on_segment(
                forward_kinematics(kArm, {q})[link], forward_kinematics(kArm, {q})[link + 1],
                obs.center);
            if (foot.t < 1e-3 || foot.t > 1.0 - 1e-3) continue;
            bool branch_stable = true;
            for (int j = 0; j < 3 && branch_stable; ++j) {
                for (double sgn : {-1.0, 1.0}) {
                    DenseVector qq = q;
                    qq[j] += sgn * step;
                    const auto pts = forward_kinematics(kArm, {qq});
                    const SegmentClosest f2 =
                        closest_point_on_segment(pts[link], pts[link + 1], obs.center);
                    if (f2.t < 1e-3 || f2.t > 1.0 - 1e-3) branch_stable = false;
                }
            }
            if (!branch_stable) continue;

            ++checked;
            for (std::size_t j = 0; j < 3; ++j) {
                DenseVector qp = q, qm = q;
                qp[j] += step;
                qm[j] -= step;
                const double fd =
                    (seg_h(kArm, {qp}, link, obs) - seg_h(kArm, {qm}, link, obs)) / (2 * step);
                CHECK(std::abs(fd - p.jac_row[j]) < 1e-5);
            }
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("h is continuous along joint-space segments") {
    Rng rng(53);
    const DiskObstacle obs{{0.03, 0.17}, 0.05};
    const double arm_length = kArm.total_length();
    for (int trial = 0; trial < 10; ++trial) {
        DenseVector qa(3), qb(3);
        for (int j = 0; j < 3; ++j) {
            qa[j] = rng.uniform(-kPi, kPi);
            qb[j] = rng.uniform(-kPi, kPi);
        }
        const double res = 1e-3;
        double step_l1 = 0.0;
        for (int j = 0; j < 3; ++j) step_l1 += std::abs(qb[j] - qa[j]) * res;
        for (std::size_t link = 0; link < 3; ++link) {
            double prev = 0.0;
            for (int k = 0; k <= 1000; ++k) {
                DenseVector q(3);
                const double t = k * res;
                for (int j = 0; j < 3; ++j) q[j] = qa[j] + t * (qb[j] - qa[j]);
                const double h = seg_h(kArm, {q}, link, obs);
                if (k > 0) CHECK(std::abs(h - prev) <= arm_length * step_l1 + 1e-12);
                prev = h;
            }
        }
    }
}
