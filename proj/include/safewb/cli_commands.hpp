#pragma once

// Command implementations behind the CLI, shaped for direct testing.
// Exit codes: 0 success, 1 run did not meet its goal / fuzz found
// disagreements, 2 configuration or input-file error, 3 solver failure,
// 4 safety violation (h' <= 0 at some step).

#include <string>

#include "safewb/simulate.hpp"

namespace safewb {

int cmd_simulate(const std::string& scene_path, const std::string& out_dir);
int cmd_fuzz(const FuzzConfig& cfg, const std::string& out_dir);
int cmd_plot(const std::string& csv_path, const std::string& out_dir);

}  // namespace safewb
