#include "safewb/constraints.hpp"

#include <cmath>
#include <string>

namespace safewb {

std::vector<ContactPair> all_contact_pairs(const RobotModel& model,
                                           const JointState& state,
                                           const std::vector<DiskObstacle>& obstacles,
                                           double eps_rank) {
    std::vector<ContactPair> pairs;
    pairs.reserve(obstacles.size() * model.num_links());
    for (const DiskObstacle& obs : obstacles)
        for (std::size_t link = 0; link < model.num_links(); ++link)
            pairs.push_back(closest_pair(model, state, link, obs, eps_rank));
    return pairs;
}

GeneralFormProblem assemble(const std::vector<ContactPair>& pairs,
                            const DenseVector& u_des, double tau,
                            const MarginSpec& margins, const KappaMap& kappa,
                            double eps_rank) {
    const std::size_t m = pairs.size();
    if (m == 0) throw DimensionMismatch("assemble: no contact pairs");
    const std::size_t n = pairs.front().jac_row.size();
    if (u_des.size() != n) throw DimensionMismatch("assemble: u_des length mismatch");
    if (margins.delta.size() != m)
        throw DimensionMismatch("assemble: margin vector has " +
                                std::to_string(margins.delta.size()) + " entries for " +
                                std::to_string(m) + " constraints");
    if (!(tau > 0.0)) throw ConfigError("assemble: tau must be positive", 0, "tau");
    if (margins.kind == MarginKind::CBF && !(kappa.gain > 0.0))
        throw ConfigError("assemble: kappa gain must be positive", 0, "kappa_gain");
    require_finite(u_des, "assemble u_des");

    GeneralFormProblem p;
    p.A = DenseMatrix(m, n);
    p.b = DenseVector(m);
    p.h = DenseVector(m);
    p.tau = tau;
    p.u_des = u_des;

    for (std::size_t i = 0; i < m; ++i) {
        const ContactPair& pair = pairs[i];
        if (pair.jac_row.size() != n)
            throw DimensionMismatch("assemble: inconsistent jac_row length at pair " +
                                    std::to_string(i));
        if (norm(pair.jac_row) <= eps_rank)
            throw DegenerateRow(i, "assemble: constraint gradient " + std::to_string(i) +
                                       " vanished (link " + std::to_string(pair.link_index) + ")");
        if (margins.delta[i] < 0.0)
            throw ConfigError("assemble: margin " + std::to_string(i) + " is negative", 0,
                              "delta");
        p.A.set_row(i, pair.jac_row);
        p.h[i] = pair.h;

        // Both kinds multiply the gap by a rate; computing the LC rate as
        // gap * (1/tau) keeps b bit-identical to the CBF kind at gain = 1/tau.
        const double gap = margins.delta[i] - pair.h;
        const double rate =
            (margins.kind == MarginKind::LC) ? (1.0 / tau) * gap : kappa.gain * gap;
        p.b[i] = rate - dot(pair.jac_row, u_des);
    }
    return p;
}

GeneralFormProblem assemble(const RobotModel& model, const JointState& state,
                            const std::vector<DiskObstacle>& obstacles,
                            const DenseVector& u_des, double tau,
                            const MarginSpec& margins, const KappaMap& kappa,
                            double eps_rank) {
    return assemble(all_contact_pairs(model, state, obstacles, eps_rank), u_des, tau,
                    margins, kappa, eps_rank);
}

DenseVector feasibility_margin(const GeneralFormProblem& problem, const DenseVector& x) {
    if (x.size() != problem.dim())
        throw DimensionMismatch("feasibility_margin: x length mismatch");
    return sub(matvec(problem.A, x), problem.b);
}

}  // namespace safewb
