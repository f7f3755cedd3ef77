#include "safewb/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace safewb {

void SimConfig::validate() const {
    model.validate();
    if (obstacles.empty())
        throw ConfigError("scene needs at least one obstacle", 0, "obstacle");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const DiskObstacle& o = obstacles[i];
        if (!(o.radius > 0.0) || !std::isfinite(o.radius))
            throw ConfigError("obstacle " + std::to_string(i) + " radius must be positive",
                              0, "obstacle");
        if (!std::isfinite(o.center[0]) || !std::isfinite(o.center[1]))
            throw ConfigError("obstacle " + std::to_string(i) + " center must be finite",
                              0, "obstacle");
    }
    if (q0.q.size() != model.num_links())
        throw ConfigError("q0 has " + std::to_string(q0.q.size()) + " angles for " +
                              std::to_string(model.num_links()) + " links",
                          0, "q0");
    if (!q0.q.all_finite()) throw ConfigError("q0 must be finite", 0, "q0");
    if (!std::isfinite(goal[0]) || !std::isfinite(goal[1]))
        throw ConfigError("goal must be finite", 0, "goal");
    if (!(k_p > 0.0)) throw ConfigError("k_p must be positive", 0, "k_p");
    if (!(tau > 0.0)) throw ConfigError("tau must be positive", 0, "tau");
    if (delta.size() != num_constraints())
        throw ConfigError("delta has " + std::to_string(delta.size()) + " entries for " +
                              std::to_string(num_constraints()) + " constraints",
                          0, "delta");
    for (std::size_t i = 0; i < delta.size(); ++i)
        if (delta[i] < 0.0 || !std::isfinite(delta[i]))
            throw ConfigError("delta entries must be nonnegative", 0, "delta");
    if (kappa_gain < 0.0 || !std::isfinite(kappa_gain))
        throw ConfigError("kappa_gain must be nonnegative", 0, "kappa_gain");
    if (max_steps < 1) throw ConfigError("max_steps must be at least 1", 0, "max_steps");
    if (!(goal_tol > 0.0)) throw ConfigError("goal_tol must be positive", 0, "goal_tol");
}

DenseVector desired_velocity(const RobotModel& model, const JointState& state,
                             const Vec2& goal, double k_p, double eps_rank) {
    const std::vector<Vec2> pts = forward_kinematics(model, state);
    const Vec2& ee = pts.back();
    const double dx = goal[0] - ee[0], dy = goal[1] - ee[1];
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (dist <= eps_rank)
        throw Error("desired_velocity: end effector is at the goal, direction undefined");

    DenseVector v_des{k_p * dx / dist, k_p * dy / dist};

    const DenseMatrix J = end_effector_jacobian(model, state);
    const std::size_t n = J.cols();

    if (n == 1) {
        // Single joint: least squares through the 1x1 normal equation.
        const double jtj = J(0, 0) * J(0, 0) + J(1, 0) * J(1, 0);
        if (jtj <= eps_rank * eps_rank)
            throw SingularJacobian("desired_velocity: Jacobian column vanished");
        return DenseVector{(J(0, 0) * v_des[0] + J(1, 0) * v_des[1]) / jtj};
    }

    // Minimum-norm pinv through the 2x2 Gram J J^T; rank check on its
    // singular values via the quadratic formula.
    DenseMatrix G(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = i; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += J(i, c) * J(j, c);
            G(i, j) = s;
            G(j, i) = s;
        }
    const double tr = G(0, 0) + G(1, 1);
    const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double eig_min = tr / 2.0 - disc;
    const double eig_max = tr / 2.0 + disc;
    const double sigma_min = std::sqrt(std::max(0.0, eig_min));
    const double sigma_max = std::sqrt(std::max(0.0, eig_max));
    if (sigma_min <= eps_rank * std::max(1.0, sigma_max))
        throw SingularJacobian(
            "desired_velocity: end-effector Jacobian lost row rank (arm folded or "
            "stretched toward the goal)");

    const DenseVector y = solve_linear(G, v_des, eps_rank);
    DenseVector u(n);
    for (std::size_t c = 0; c < n; ++c) u[c] = J(0, c) * y[0] + J(1, c) * y[1];
    return u;
}

StepResult step(const SimConfig& config, const JointState& q_k, std::size_t k) {
    const std::vector<ContactPair> pairs =
        all_contact_pairs(config.model, q_k, config.obstacles);
    const DenseVector u_des =
        desired_velocity(config.model, q_k, config.goal, config.k_p);

    const KappaMap kappa{config.effective_kappa_gain()};
    const GeneralFormProblem prob_cbf =
        assemble(pairs, u_des, config.tau, {config.delta, MarginKind::CBF}, kappa);
    const GeneralFormProblem prob_lc =
        assemble(pairs, u_des, config.tau, {config.delta, MarginKind::LC}, kappa);

    const SafeSolve cbf = qp_min_norm(prob_cbf);
    const SafeSolve lc = lc_solve(prob_lc);
    if (cbf.status != SolveStatus::Optimal)
        throw Error("step " + std::to_string(k) + ": CBF-QP solve not optimal");
    if (lc.status != SolveStatus::Optimal)
        throw Error("step " + std::to_string(k) + ": complementarity solve not optimal");

    StepRecord rec;
    rec.k = k;
    rec.q = q_k.q;
    rec.u_cbf = add(u_des, cbf.x_star);
    rec.u_lc = add(u_des, lc.x_star);
    rec.u_applied = (config.controller == ControllerChoice::LC) ? rec.u_lc : rec.u_cbf;
    rec.e = norm(sub(rec.u_lc, rec.u_cbf));

    rec.h = DenseVector(pairs.size());
    rec.hprime = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        rec.h[i] = pairs[i].h;
        rec.hprime = std::min(rec.hprime, pairs[i].h - config.delta[i]);
    }

    const KktResiduals kc = kkt_residuals(prob_cbf, cbf.x_star, cbf.lambda_star);
    const KktResiduals kl = kkt_residuals(prob_lc, lc.x_star, lc.lambda_star);
    rec.kkt_stationarity = std::max(kc.stationarity, kl.stationarity);
    rec.kkt_complementarity = std::max(kc.complementarity, kl.complementarity);
    rec.kkt_dual_min = std::min(kc.dual_min, kl.dual_min);
    rec.kkt_primal_min = std::min(kc.primal_min, kl.primal_min);

    StepResult out;
    out.record = rec;
    out.next.q = DenseVector(q_k.q.size());
    for (std::size_t j = 0; j < q_k.q.size(); ++j)
        out.next.q[j] = q_k.q[j] + config.tau * rec.u_applied[j];
    return out;
}

std::pair<TrajectoryLog, RunMetrics> run(const SimConfig& config) {
    config.validate();

    TrajectoryLog log;
    JointState q = config.q0;
    Termination term = Termination::MaxSteps;

    auto goal_distance = [&](const JointState& s) {
        const std::vector<Vec2> pts = forward_kinematics(config.model, s);
        const double dx = config.goal[0] - pts.back()[0];
        const double dy = config.goal[1] - pts.back()[1];
        return std::sqrt(dx * dx + dy * dy);
    };

    for (std::size_t k = 0; k < config.max_steps; ++k) {
        if (goal_distance(q) <= config.goal_tol) {
            term = Termination::GoalReached;
            break;
        }
        try {
            StepResult res = step(config, q, k);
            log.steps.push_back(std::move(res.record));
            q = res.next;
        } catch (const Error& e) {
            term = Termination::SolverFailure;
            log.failure_reason = e.what();
            break;
        }
    }
    if (term == Termination::MaxSteps && goal_distance(q) <= config.goal_tol)
        term = Termination::GoalReached;
    log.termination = term;

    RunMetrics metrics;
    metrics.steps = log.steps.size();
    metrics.goal_error = goal_distance(q);
    if (!log.steps.empty()) {
        double e_sum = 0.0;
        metrics.e_min = std::numeric_limits<double>::infinity();
        metrics.hprime_min = std::numeric_limits<double>::infinity();
        for (const StepRecord& r : log.steps) {
            metrics.e_min = std::min(metrics.e_min, r.e);
            metrics.e_max = std::max(metrics.e_max, r.e);
            e_sum += r.e;
            metrics.hprime_min = std::min(metrics.hprime_min, r.hprime);
        }
        metrics.e_mean = e_sum / static_cast<double>(log.steps.size());
    } else {
        // Nothing stepped (q0 already at goal, or the first step failed);
        // report the margin at q0 when the geometry allows it.
        try {
            double hp = std::numeric_limits<double>::infinity();
            const auto pairs = all_contact_pairs(config.model, q, config.obstacles);
            for (std::size_t i = 0; i < pairs.size(); ++i)
                hp = std::min(hp, pairs[i].h - config.delta[i]);
            metrics.hprime_min = hp;
        } catch (const Error&) {
            metrics.hprime_min = 0.0;
        }
    }
    return {std::move(log), metrics};
}

// --- fuzz harness ----------------------------------------------------------

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::size_t Rng::uniform_index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(next_u64() % (hi - lo + 1));
}

GeneralFormProblem random_general_form(Rng& rng, const FuzzConfig& cfg) {
    const std::size_t m = rng.uniform_index(1, cfg.m_max);
    const std::size_t n = rng.uniform_index(1, cfg.n_max);

    GeneralFormProblem p;
    p.A = DenseMatrix(m, n);
    p.b = DenseVector(m);
    p.h = DenseVector(m);
    p.tau = 1.0;
    p.u_des = DenseVector(n);

    const bool inject_zero_rows = cfg.min_row_norm <= kEpsRank;
    for (std::size_t i = 0; i < m; ++i) {
        if (inject_zero_rows && rng.uniform_index(0, 15) == 0) continue;  // row stays 0
        for (int attempt = 0; attempt < 1000; ++attempt) {
            DenseVector row(n);
            for (std::size_t j = 0; j < n; ++j) row[j] = rng.uniform(-1.0, 1.0);
            if (norm(row) >= cfg.min_row_norm) {
                p.A.set_row(i, row);
                break;
            }
        }
    }
    // Occasionally duplicate an earlier row: the multiplier becomes
    // non-unique while the projection stays unique.
    if (m >= 2 && rng.uniform_index(0, 7) == 0) {
        const std::size_t dst = rng.uniform_index(1, m - 1);
        const std::size_t src = rng.uniform_index(0, dst - 1);
        p.A.set_row(dst, p.A.row(src));
    }

    for (std::size_t i = 0; i < m; ++i) p.b[i] = rng.uniform(-1.0, 1.0);
    const std::size_t mode = rng.uniform_index(0, 9);
    if (mode <= 2) {
        for (std::size_t i = 0; i < m; ++i) p.b[i] -= 1.0;  // interior-heavy
    } else if (mode <= 5) {
        for (std::size_t i = 0; i < m; ++i) p.b[i] += 1.2;  // active/infeasible-heavy
    } else if (mode == 6) {
        for (std::size_t i = 0; i < m; ++i) p.b[i] = -std::abs(p.b[i]);  // b <= 0
    }
    return p;
}

namespace {

void push_failure(FuzzReport& rep, std::size_t idx, std::string kind, std::string detail) {
    if (rep.failures.size() < 32)
        rep.failures.push_back({idx, std::move(kind), std::move(detail)});
}

}  // namespace

FuzzReport fuzz_equivalence(const FuzzConfig& cfg) {
    FuzzReport rep;
    Rng rng(cfg.seed);

    double min_dual = std::numeric_limits<double>::infinity();
    double min_primal = std::numeric_limits<double>::infinity();

    for (std::size_t idx = 0; idx < cfg.instances; ++idx) {
        const GeneralFormProblem p = random_general_form(rng, cfg);
        ++rep.instances_run;

        bool degenerate = false;
        for (std::size_t i = 0; i < p.A.rows(); ++i)
            if (norm(p.A.row(i)) <= kEpsRank) degenerate = true;
        if (degenerate) {
            rep.generator_contract_violation = true;
            push_failure(rep, idx, "generator_contract",
                         "instance contains a degenerate (near-zero) row");
            continue;
        }

        SafeSolve qp, lc;
        try {
            qp = qp_min_norm(p);
            lc = lc_solve(p);
        } catch (const Error& e) {
            push_failure(rep, idx, "exception", e.what());
            continue;
        }

        if (qp.status != lc.status) {
            ++rep.status_disagreements;
            push_failure(rep, idx, "status_disagreement", "qp vs lc status differ");
        } else if (qp.status == SolveStatus::Optimal) {
            const double rel =
                norm(sub(qp.x_star, lc.x_star)) / (1.0 + norm(qp.x_star));
            rep.max_solver_discrepancy = std::max(rep.max_solver_discrepancy, rel);
            if (rel > cfg.tol)
                push_failure(rep, idx, "solver_discrepancy",
                             "relative solution gap " + std::to_string(rel));

            for (const SafeSolve* s : {&qp, &lc}) {
                const KktResiduals k = kkt_residuals(p, s->x_star, s->lambda_star);
                rep.max_stationarity = std::max(rep.max_stationarity, k.stationarity);
                rep.max_complementarity =
                    std::max(rep.max_complementarity, k.complementarity);
                min_dual = std::min(min_dual, k.dual_min);
                min_primal = std::min(min_primal, k.primal_min);
            }
        } else {
            ++rep.infeasible_count;
        }

        if (p.A.rows() <= cfg.oracle_m_max) {
            try {
                const SafeSolve oracle = oracle_qp_enumerate(p);
                ++rep.oracle_checked;
                if (oracle.status != qp.status || oracle.status != lc.status) {
                    ++rep.status_disagreements;
                    push_failure(rep, idx, "oracle_status", "oracle status differs");
                } else if (oracle.status == SolveStatus::Optimal) {
                    const double rq = norm(sub(qp.x_star, oracle.x_star)) /
                                      (1.0 + norm(oracle.x_star));
                    const double rl = norm(sub(lc.x_star, oracle.x_star)) /
                                      (1.0 + norm(oracle.x_star));
                    rep.max_oracle_discrepancy =
                        std::max({rep.max_oracle_discrepancy, rq, rl});
                    if (std::max(rq, rl) > cfg.tol)
                        push_failure(rep, idx, "oracle_discrepancy",
                                     "gap to enumeration oracle " +
                                         std::to_string(std::max(rq, rl)));
                }
            } catch (const Error& e) {
                push_failure(rep, idx, "oracle_exception", e.what());
            }
        }
    }

    rep.min_dual = std::isfinite(min_dual) ? min_dual : 0.0;
    rep.min_primal_margin = std::isfinite(min_primal) ? min_primal : 0.0;
    rep.success = !rep.generator_contract_violation && rep.status_disagreements == 0 &&
                  rep.max_solver_discrepancy <= cfg.tol &&
                  rep.max_oracle_discrepancy <= cfg.tol && rep.failures.empty();
    return rep;
}

}  // namespace safewb
