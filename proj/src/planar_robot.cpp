#include "safewb/planar_robot.hpp"

#include <cmath>
#include <string>

namespace safewb {

namespace {

Vec2 vsub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
double vdot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
double vnorm(const Vec2& a) { return std::sqrt(vdot(a, a)); }

void check_state(const RobotModel& model, const JointState& state) {
    if (state.q.size() != model.num_links())
        throw DimensionMismatch("joint state has " + std::to_string(state.q.size()) +
                                " angles for " + std::to_string(model.num_links()) + " links");
    require_finite(state.q, "joint state");
}

}  // namespace

double RobotModel::total_length() const {
    double s = 0.0;
    for (double l : link_lengths) s += l;
    return s;
}

void RobotModel::validate() const {
    if (link_lengths.empty())
        throw ConfigError("robot must have at least one link", 0, "link_lengths");
    for (std::size_t i = 0; i < link_lengths.size(); ++i)
        if (!(link_lengths[i] > 0.0) || !std::isfinite(link_lengths[i]))
            throw ConfigError("link length " + std::to_string(i) + " must be positive",
                              0, "link_lengths");
    if (!std::isfinite(base_position[0]) || !std::isfinite(base_position[1]))
        throw ConfigError("base position must be finite", 0, "base");
}

std::vector<Vec2> forward_kinematics(const RobotModel& model, const JointState& state) {
    check_state(model, state);
    std::vector<Vec2> pts;
    pts.reserve(model.num_links() + 1);
    pts.push_back(model.base_position);
    double angle = 0.0;
    for (std::size_t k = 0; k < model.num_links(); ++k) {
        angle += state.q[k];
        const Vec2& prev = pts.back();
        pts.push_back({prev[0] + model.link_lengths[k] * std::cos(angle),
                       prev[1] + model.link_lengths[k] * std::sin(angle)});
    }
    return pts;
}

DenseMatrix end_effector_jacobian(const RobotModel& model, const JointState& state) {
    const std::vector<Vec2> pts = forward_kinematics(model, state);
    const std::size_t n = model.num_links();
    const Vec2& ee = pts.back();
    DenseMatrix J(2, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vec2 r = vsub(ee, pts[j]);
        J(0, j) = -r[1];
        J(1, j) = r[0];
    }
    return J;
}

DenseMatrix point_jacobian(const RobotModel& model, const JointState& state,
                           std::size_t link_index, const Vec2& p) {
    const std::vector<Vec2> pts = forward_kinematics(model, state);
    const std::size_t n = model.num_links();
    if (link_index >= n)
        throw DimensionMismatch("link index " + std::to_string(link_index) + " out of range");

    const SegmentClosest foot = closest_point_on_segment(pts[link_index], pts[link_index + 1], p);
    if (vnorm(vsub(foot.point, p)) > 1e-9)
        throw PointOffLink("point is not on link " + std::to_string(link_index));

    DenseMatrix J(2, n);
    for (std::size_t j = 0; j <= link_index; ++j) {
        const Vec2 r = vsub(p, pts[j]);
        J(0, j) = -r[1];
        J(1, j) = r[0];
    }
    return J;
}

SegmentClosest closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ab = vsub(b, a);
    const double len2 = vdot(ab, ab);
    double t = 0.0;
    if (len2 > 0.0) t = vdot(vsub(c, a), ab) / len2;
    t = std::fmin(1.0, std::fmax(0.0, t));
    return {{a[0] + t * ab[0], a[1] + t * ab[1]}, t};
}

ContactPair closest_pair(const RobotModel& model, const JointState& state,
                         std::size_t link_index, const DiskObstacle& obstacle,
                         double eps_rank) {
    const std::vector<Vec2> pts = forward_kinematics(model, state);
    if (link_index >= model.num_links())
        throw DimensionMismatch("link index " + std::to_string(link_index) + " out of range");

    const SegmentClosest foot =
        closest_point_on_segment(pts[link_index], pts[link_index + 1], obstacle.center);
    const Vec2 to_pc = vsub(foot.point, obstacle.center);
    const double dist = vnorm(to_pc);
    if (dist <= eps_rank)
        throw DegenerateNormal("obstacle center lies on link " + std::to_string(link_index));

    ContactPair pair;
    pair.link_index = link_index;
    pair.p_c = foot.point;
    pair.normal = {to_pc[0] / dist, to_pc[1] / dist};
    pair.h = dist - obstacle.radius;
    pair.p_o = {obstacle.center[0] + obstacle.radius * pair.normal[0],
                obstacle.center[1] + obstacle.radius * pair.normal[1]};

    const DenseMatrix Jc = point_jacobian(model, state, link_index, pair.p_c);
    pair.jac_row = DenseVector(model.num_links());
    for (std::size_t j = 0; j < model.num_links(); ++j)
        pair.jac_row[j] = pair.normal[0] * Jc(0, j) + pair.normal[1] * Jc(1, j);
    return pair;
}

}  // namespace safewb
