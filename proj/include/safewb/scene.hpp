#pragma once

// Scene files are flat key = value text. Vector values are whitespace
// separated; `obstacle` may repeat, one disk per line; `delta` accepts a
// scalar (broadcast to every constraint) or one entry per constraint.
// Unknown keys and malformed values fail with a line/field diagnostic.
//
//   link_lengths = 0.1 0.05 0.05
//   base        = 0 0
//   obstacle    = 0.03 0.170 0.05      # center_x center_y radius
//   q0          = 2.0 -0.5 -0.5
//   goal        = -0.05 0.15
//   k_p         = 0.05
//   tau         = 0.005
//   delta       = 0.01
//   kappa_gain  = 200                  # optional, defaults to 1/tau
//   controller  = both                 # cbf | lc | both
//   max_steps   = 20000
//   goal_tol    = 1e-3

#include <iosfwd>
#include <string>

#include "safewb/simulate.hpp"

namespace safewb {

SimConfig parse_scene(std::istream& in);
SimConfig parse_scene_file(const std::string& path);

}  // namespace safewb
