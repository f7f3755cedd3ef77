#pragma once

// Planar n-link revolute serial chain: forward kinematics, point Jacobians,
// and closest-point geometry between link segments and disk obstacles.
// Links are zero-thickness segments; physical link radius is absorbed into
// the safety margin downstream.

#include <array>
#include <cstddef>
#include <vector>

#include "safewb/numkit.hpp"

namespace safewb {

using Vec2 = std::array<double, 2>;

struct RobotModel {
    std::vector<double> link_lengths;  // meters, each > 0
    Vec2 base_position{0.0, 0.0};

    std::size_t num_links() const { return link_lengths.size(); }
    double total_length() const;
    void validate() const;  // throws ConfigError on bad geometry
};

struct JointState {
    DenseVector q;  // radians, one angle per link
};

struct DiskObstacle {
    Vec2 center{0.0, 0.0};
    double radius = 0.0;  // meters, > 0
};

// Closest-point data for one (link, obstacle) pair.
struct ContactPair {
    std::size_t link_index = 0;
    Vec2 p_c{0.0, 0.0};      // closest point on the link segment
    Vec2 p_o{0.0, 0.0};      // closest point on the obstacle surface
    Vec2 normal{0.0, 0.0};   // unit vector from obstacle center toward p_c
    double h = 0.0;          // signed distance, negative under penetration
    DenseVector jac_row;     // d h / d q = normal^T * J_c
};

// Joint positions base through end effector: num_links()+1 points.
std::vector<Vec2> forward_kinematics(const RobotModel& model, const JointState& state);

// 2 x n Jacobian of the end-effector position.
DenseMatrix end_effector_jacobian(const RobotModel& model, const JointState& state);

// 2 x n Jacobian of a point p attached to link link_index. Columns past the
// link are zero. Throws PointOffLink if p is not on the segment (1e-9).
DenseMatrix point_jacobian(const RobotModel& model, const JointState& state,
                           std::size_t link_index, const Vec2& p);

// Closest points between one link segment and a disk, with the contact
// Jacobian row. Throws DegenerateNormal if the disk center lies on the
// segment.
ContactPair closest_pair(const RobotModel& model, const JointState& state,
                         std::size_t link_index, const DiskObstacle& obstacle,
                         double eps_rank = kEpsRank);

// Closest point on segment [a, b] to point c, plus its curve parameter t.
struct SegmentClosest {
    Vec2 point;
    double t;  // clamped to [0, 1]
};
SegmentClosest closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace safewb
