#pragma once

// Static SVG 1.1 rendering of a logged run: a scene view (arm snapshots,
// obstacle, end-effector path) and stacked curves of the reduced constraint
// h' and the solution error e over time.

#include <iosfwd>
#include <string>

#include "safewb/trajectory_io.hpp"

namespace safewb {

void plot_scene_svg(std::ostream& out, const TrajectoryData& data);
void plot_curves_svg(std::ostream& out, const TrajectoryData& data);

void plot_scene_svg_file(const std::string& path, const TrajectoryData& data);
void plot_curves_svg_file(const std::string& path, const TrajectoryData& data);

}  // namespace safewb
