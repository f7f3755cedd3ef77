#include "safewb/scene.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace safewb {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& value, std::size_t line,
                                  const std::string& key) {
    std::istringstream ss(value);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                                  "': cannot parse number '" + tok + "'",
                              line, key);
        }
    }
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": field '" + key + "' is empty",
                          line, key);
    return out;
}

double parse_scalar(const std::string& value, std::size_t line, const std::string& key) {
    const std::vector<double> v = parse_numbers(value, line, key);
    if (v.size() != 1)
        throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                              "' expects a single number",
                          line, key);
    return v[0];
}

}  // namespace

SimConfig parse_scene(std::istream& in) {
    SimConfig cfg;
    std::map<std::string, bool> seen;
    std::vector<double> delta_values;
    bool have_links = false, have_q0 = false, have_goal = false, have_tau = false,
         have_delta = false;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'",
                              line_no, "");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": missing key", line_no, "");

        if (key != "obstacle") {
            if (seen[key])
                throw ConfigError("line " + std::to_string(line_no) + ": duplicate field '" +
                                      key + "'",
                                  line_no, key);
            seen[key] = true;
        }

        if (key == "link_lengths") {
            cfg.model.link_lengths = parse_numbers(value, line_no, key);
            have_links = true;
        } else if (key == "base") {
            const auto v = parse_numbers(value, line_no, key);
            if (v.size() != 2)
                throw ConfigError("line " + std::to_string(line_no) + ": base expects 2 numbers",
                                  line_no, key);
            cfg.model.base_position = {v[0], v[1]};
        } else if (key == "obstacle") {
            const auto v = parse_numbers(value, line_no, key);
            if (v.size() != 3)
                throw ConfigError("line " + std::to_string(line_no) +
                                      ": obstacle expects 'cx cy radius'",
                                  line_no, key);
            cfg.obstacles.push_back({{v[0], v[1]}, v[2]});
        } else if (key == "q0") {
            cfg.q0.q = DenseVector(parse_numbers(value, line_no, key));
            have_q0 = true;
        } else if (key == "goal") {
            const auto v = parse_numbers(value, line_no, key);
            if (v.size() != 2)
                throw ConfigError("line " + std::to_string(line_no) + ": goal expects 2 numbers",
                                  line_no, key);
            cfg.goal = {v[0], v[1]};
            have_goal = true;
        } else if (key == "k_p") {
            cfg.k_p = parse_scalar(value, line_no, key);
        } else if (key == "tau") {
            cfg.tau = parse_scalar(value, line_no, key);
            have_tau = true;
        } else if (key == "delta") {
            delta_values = parse_numbers(value, line_no, key);
            have_delta = true;
        } else if (key == "kappa_gain") {
            cfg.kappa_gain = parse_scalar(value, line_no, key);
        } else if (key == "max_steps") {
            const double v = parse_scalar(value, line_no, key);
            if (v < 1.0)
                throw ConfigError("line " + std::to_string(line_no) + ": max_steps must be >= 1",
                                  line_no, key);
            cfg.max_steps = static_cast<std::size_t>(v);
        } else if (key == "goal_tol") {
            cfg.goal_tol = parse_scalar(value, line_no, key);
        } else if (key == "controller") {
            if (value == "cbf")
                cfg.controller = ControllerChoice::CBF;
            else if (value == "lc")
                cfg.controller = ControllerChoice::LC;
            else if (value == "both")
                cfg.controller = ControllerChoice::Both;
            else
                throw ConfigError("line " + std::to_string(line_no) +
                                      ": controller must be cbf, lc or both",
                                  line_no, key);
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown field '" + key + "'",
                              line_no, key);
        }
    }

    if (!have_links) throw ConfigError("missing field 'link_lengths'", 0, "link_lengths");
    if (cfg.obstacles.empty()) throw ConfigError("missing field 'obstacle'", 0, "obstacle");
    if (!have_q0) throw ConfigError("missing field 'q0'", 0, "q0");
    if (!have_goal) throw ConfigError("missing field 'goal'", 0, "goal");
    if (!have_tau) throw ConfigError("missing field 'tau'", 0, "tau");
    if (!have_delta) throw ConfigError("missing field 'delta'", 0, "delta");

    const std::size_t m = cfg.num_constraints();
    if (delta_values.size() == 1) {
        cfg.delta = DenseVector(m);
        for (std::size_t i = 0; i < m; ++i) cfg.delta[i] = delta_values[0];
    } else if (delta_values.size() == m) {
        cfg.delta = DenseVector(delta_values);
    } else {
        throw ConfigError("field 'delta' expects 1 or " + std::to_string(m) + " entries, got " +
                              std::to_string(delta_values.size()),
                          0, "delta");
    }

    cfg.validate();
    return cfg;
}

SimConfig parse_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scene file '" + path + "'", 0, "");
    return parse_scene(in);
}

}  // namespace safewb
