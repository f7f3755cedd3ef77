#include "safewb/trajectory_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace safewb {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += fmt(v[i]);
    }
    return s;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::GoalReached: return "GoalReached";
        case Termination::MaxSteps: return "MaxSteps";
        case Termination::SolverFailure: return "SolverFailure";
    }
    return "Unknown";
}

void write_trajectory_csv(std::ostream& out, const SimConfig& config,
                          const TrajectoryLog& log) {
    const std::size_t n = config.model.num_links();
    const std::size_t m = config.num_constraints();

    out << "# scene links = " << join(config.model.link_lengths) << "\n";
    out << "# scene base = " << fmt(config.model.base_position[0]) << ' '
        << fmt(config.model.base_position[1]) << "\n";
    for (const DiskObstacle& o : config.obstacles)
        out << "# scene obstacle = " << fmt(o.center[0]) << ' ' << fmt(o.center[1]) << ' '
            << fmt(o.radius) << "\n";
    out << "# scene goal = " << fmt(config.goal[0]) << ' ' << fmt(config.goal[1]) << "\n";
    out << "# scene delta = " << join(config.delta.data()) << "\n";
    out << "# scene termination = " << termination_name(log.termination) << "\n";

    out << "k,t";
    for (std::size_t j = 0; j < n; ++j) out << ",q_" << j;
    for (std::size_t j = 0; j < n; ++j) out << ",u_cbf_" << j;
    for (std::size_t j = 0; j < n; ++j) out << ",u_lc_" << j;
    for (std::size_t i = 0; i < m; ++i) out << ",h_" << i;
    out << ",hprime,e\n";

    for (const StepRecord& r : log.steps) {
        out << r.k << ',' << fmt(static_cast<double>(r.k) * config.tau);
        for (std::size_t j = 0; j < n; ++j) out << ',' << fmt(r.q[j]);
        for (std::size_t j = 0; j < n; ++j) out << ',' << fmt(r.u_cbf[j]);
        for (std::size_t j = 0; j < n; ++j) out << ',' << fmt(r.u_lc[j]);
        for (std::size_t i = 0; i < m; ++i) out << ',' << fmt(r.h[i]);
        out << ',' << fmt(r.hprime) << ',' << fmt(r.e) << "\n";
    }
}

void write_trajectory_csv_file(const std::string& path, const SimConfig& config,
                               const TrajectoryLog& log) {
    auto out = open_out(path);
    write_trajectory_csv(out, config, log);
}

void write_metrics_json(std::ostream& out, const RunMetrics& metrics,
                        Termination termination) {
    nlohmann::ordered_json j;
    j["termination"] = termination_name(termination);
    j["steps"] = metrics.steps;
    j["goal_error"] = metrics.goal_error;
    j["e_min"] = metrics.e_min;
    j["e_mean"] = metrics.e_mean;
    j["e_max"] = metrics.e_max;
    j["hprime_min"] = metrics.hprime_min;
    out << j.dump(2) << "\n";
}

void write_metrics_json_file(const std::string& path, const RunMetrics& metrics,
                             Termination termination) {
    auto out = open_out(path);
    write_metrics_json(out, metrics, termination);
}

void write_fuzz_report_json(std::ostream& out, const FuzzConfig& cfg,
                            const FuzzReport& report) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["count"] = cfg.instances;
    j["m_max"] = cfg.m_max;
    j["n_max"] = cfg.n_max;
    j["tol"] = cfg.tol;
    j["instances_run"] = report.instances_run;
    j["oracle_checked"] = report.oracle_checked;
    j["infeasible_count"] = report.infeasible_count;
    j["max_solver_discrepancy"] = report.max_solver_discrepancy;
    j["max_oracle_discrepancy"] = report.max_oracle_discrepancy;
    j["max_stationarity"] = report.max_stationarity;
    j["max_complementarity"] = report.max_complementarity;
    j["min_dual"] = report.min_dual;
    j["min_primal_margin"] = report.min_primal_margin;
    j["status_disagreements"] = report.status_disagreements;
    j["generator_contract_violation"] = report.generator_contract_violation;
    j["success"] = report.success;
    // kept flat: the first failure is enough to reproduce, the seed replays
    j["failure_count"] = report.failures.size();
    if (!report.failures.empty()) {
        j["first_failure_index"] = report.failures.front().index;
        j["first_failure_kind"] = report.failures.front().kind;
        j["first_failure_detail"] = report.failures.front().detail;
    }
    out << j.dump(2) << "\n";
}

void write_fuzz_report_json_file(const std::string& path, const FuzzConfig& cfg,
                                 const FuzzReport& report) {
    auto out = open_out(path);
    write_fuzz_report_json(out, cfg, report);
}

std::size_t TrajectoryData::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw ConfigError("trajectory is missing column '" + name + "'", 0, name);
}

std::size_t TrajectoryData::joint_count() const { return link_lengths.size(); }

namespace {

std::vector<double> numbers_after(const std::string& line, std::size_t eq_pos) {
    std::istringstream ss(line.substr(eq_pos + 1));
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    return out;
}

}  // namespace

TrajectoryData read_trajectory_csv(std::istream& in) {
    TrajectoryData data;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string head = line.substr(0, eq);
            auto has = [&](const char* key) { return head.find(key) != std::string::npos; };
            if (has("links")) {
                data.link_lengths = numbers_after(line, eq);
            } else if (has("base")) {
                const auto v = numbers_after(line, eq);
                if (v.size() == 2) data.base = {v[0], v[1]};
            } else if (has("obstacle")) {
                const auto v = numbers_after(line, eq);
                if (v.size() == 3) data.obstacles.push_back({{v[0], v[1]}, v[2]});
            } else if (has("goal")) {
                const auto v = numbers_after(line, eq);
                if (v.size() == 2) data.goal = {v[0], v[1]};
            } else if (has("delta")) {
                data.delta = numbers_after(line, eq);
            }
            continue;
        }

        std::istringstream ss(line);
        std::string cell;
        if (!header_seen) {
            while (std::getline(ss, cell, ',')) data.columns.push_back(cell);
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("line " + std::to_string(line_no) +
                                      ": cannot parse numeric cell '" + cell + "'",
                                  line_no, "");
            }
        }
        if (row.size() != data.columns.size())
            throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(data.columns.size()) + " cells, got " +
                                  std::to_string(row.size()),
                              line_no, "");
        data.rows.push_back(std::move(row));
    }

    if (!header_seen) throw ConfigError("trajectory file has no header row", 0, "");
    if (data.link_lengths.empty())
        throw ConfigError("trajectory is missing the '# scene links' preamble", 0, "links");
    return data;
}

TrajectoryData read_trajectory_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trajectory file '" + path + "'", 0, "");
    return read_trajectory_csv(in);
}

}  // namespace safewb
