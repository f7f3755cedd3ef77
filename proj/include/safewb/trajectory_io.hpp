#pragma once

// Serialization of trajectory logs and run metrics. The CSV carries a
// commented scene preamble (geometry needed to redraw the arm) followed by a
// header row and one row per step; numbers use 17 significant digits so
// files are byte-stable for regression comparison.

#include <iosfwd>
#include <string>
#include <vector>

#include "safewb/simulate.hpp"

namespace safewb {

void write_trajectory_csv(std::ostream& out, const SimConfig& config,
                          const TrajectoryLog& log);
void write_trajectory_csv_file(const std::string& path, const SimConfig& config,
                               const TrajectoryLog& log);

void write_metrics_json(std::ostream& out, const RunMetrics& metrics,
                        Termination termination);
void write_metrics_json_file(const std::string& path, const RunMetrics& metrics,
                             Termination termination);

void write_fuzz_report_json(std::ostream& out, const FuzzConfig& cfg,
                            const FuzzReport& report);
void write_fuzz_report_json_file(const std::string& path, const FuzzConfig& cfg,
                                 const FuzzReport& report);

const char* termination_name(Termination t);

// Parsed-back trajectory with its scene preamble, as needed for plotting.
struct TrajectoryData {
    std::vector<double> link_lengths;
    Vec2 base{0.0, 0.0};
    std::vector<DiskObstacle> obstacles;
    Vec2 goal{0.0, 0.0};
    std::vector<double> delta;

    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const;  // throws ConfigError
    std::size_t joint_count() const;
};

TrajectoryData read_trajectory_csv(std::istream& in);
TrajectoryData read_trajectory_csv_file(const std::string& path);

}  // namespace safewb
