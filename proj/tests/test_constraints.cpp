#include "safewb/constraints.hpp"

#include <cmath>

#include "doctest.h"
#include "safewb/simulate.hpp"  // Rng

using namespace safewb;

namespace {

ContactPair make_pair(double h, DenseVector jac) {
    ContactPair p;
    p.h = h;
    p.jac_row = std::move(jac);
    p.normal = {1.0, 0.0};
    return p;
}

}  // namespace

TEST_CASE("assemble computes b by the stated formulas") {
    // h=0.5, delta=0.01, tau=0.05, A.u_des = 1 -> b = (0.01-0.5)/0.05 - 1 = -10.8
    const std::vector<ContactPair> pairs{make_pair(0.5, DenseVector{1.0, 0.0})};
    const DenseVector u_des{1.0, 0.0};

    const GeneralFormProblem lc =
        assemble(pairs, u_des, 0.05, {DenseVector{0.01}, MarginKind::LC}, {20.0});
    CHECK(lc.b[0] == doctest::Approx(-10.8).epsilon(1e-14));

    // the CBF path with gain = 1/tau = 20 lands on the same value
    const GeneralFormProblem cbf =
        assemble(pairs, u_des, 0.05, {DenseVector{0.01}, MarginKind::CBF}, {20.0});
    CHECK(cbf.b[0] == doctest::Approx(-10.8).epsilon(1e-14));
    CHECK(cbf.b[0] == lc.b[0]);  // bit identical
}

TEST_CASE("state on the margin surface with zero u_des gives b = 0") {
    const std::vector<ContactPair> pairs{make_pair(0.01, DenseVector{0.3, -0.4})};
    const DenseVector u0{0.0, 0.0};
    const GeneralFormProblem p =
        assemble(pairs, u0, 0.05, {DenseVector{0.01}, MarginKind::LC}, {20.0});
    CHECK(p.b[0] == 0.0);
}

TEST_CASE("LC and CBF kinds agree bitwise when gain = 1/tau") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.uniform_index(1, 5);
        const std::size_t m = rng.uniform_index(1, 5);
        std::vector<ContactPair> pairs;
        DenseVector delta(m);
        for (std::size_t i = 0; i < m; ++i) {
            DenseVector row(n);
            do {
                for (std::size_t j = 0; j < n; ++j) row[j] = rng.uniform(-1, 1);
            } while (norm(row) < 0.1);
            pairs.push_back(make_pair(rng.uniform(-0.2, 0.7), row));
            delta[i] = rng.uniform(0.0, 0.05);
        }
        DenseVector u_des(n);
        for (std::size_t j = 0; j < n; ++j) u_des[j] = rng.uniform(-1, 1);
        const double tau = rng.uniform(0.001, 0.1);

        const GeneralFormProblem lc =
            assemble(pairs, u_des, tau, {delta, MarginKind::LC}, {1.0 / tau});
        const GeneralFormProblem cbf =
            assemble(pairs, u_des, tau, {delta, MarginKind::CBF}, {1.0 / tau});
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(lc.b[i] == cbf.b[i]);
            for (std::size_t j = 0; j < n; ++j) CHECK(lc.A(i, j) == cbf.A(i, j));
        }
    }
}

TEST_CASE("b is affine in u_des") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4;
        std::vector<ContactPair> pairs;
        for (int i = 0; i < 3; ++i) {
            DenseVector row(n);
            do {
                for (std::size_t j = 0; j < n; ++j) row[j] = rng.uniform(-1, 1);
            } while (norm(row) < 0.1);
            pairs.push_back(make_pair(rng.uniform(0.0, 0.5), row));
        }
        DenseVector u_des(n), zero(n);
        for (std::size_t j = 0; j < n; ++j) u_des[j] = rng.uniform(-2, 2);
        const DenseVector delta{0.01, 0.01, 0.01};

        const GeneralFormProblem with_u =
            assemble(pairs, u_des, 0.01, {delta, MarginKind::LC}, {100.0});
        const GeneralFormProblem with_0 =
            assemble(pairs, zero, 0.01, {delta, MarginKind::LC}, {100.0});
        const DenseVector au = matvec(with_u.A, u_des);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(with_u.b[i] == doctest::Approx(with_0.b[i] - au[i]).epsilon(1e-12));
    }
}

TEST_CASE("degenerate gradient rows abort assembly") {
    const std::vector<ContactPair> pairs{make_pair(0.5, DenseVector{1.0, 0.0}),
                                         make_pair(0.2, DenseVector{0.0, 0.0})};
    const DenseVector u0{0.0, 0.0};
    try {
        assemble(pairs, u0, 0.05, {DenseVector{0.01, 0.01}, MarginKind::LC}, {20.0});
        FAIL("expected DegenerateRow");
    } catch (const DegenerateRow& e) {
        CHECK(e.row_index == 1);
    }
}

TEST_CASE("assembly rejects inconsistent dimensions") {
    const std::vector<ContactPair> pairs{make_pair(0.5, DenseVector{1.0, 0.0})};
    CHECK_THROWS_AS(
        assemble(pairs, DenseVector{1.0}, 0.05, {DenseVector{0.01}, MarginKind::LC}, {20.0}),
        DimensionMismatch);
    CHECK_THROWS_AS(assemble(pairs, DenseVector{1.0, 0.0}, 0.05,
                             {DenseVector{0.01, 0.02}, MarginKind::LC}, {20.0}),
                    DimensionMismatch);
}

TEST_CASE("feasibility_margin") {
    GeneralFormProblem p;
    p.A = DenseMatrix::from_rows({{1.0, 0.0}});
    p.b = DenseVector{2.0};
    p.tau = 0.05;
    p.u_des = DenseVector{0.0, 0.0};
    p.h = DenseVector{0.0};

    const DenseVector at_boundary = feasibility_margin(p, DenseVector{2.0, 0.0});
    CHECK(at_boundary[0] == doctest::Approx(0.0));

    p.b[0] = -1.5;
    const DenseVector at_zero = feasibility_margin(p, DenseVector{0.0, 0.0});
    CHECK(at_zero[0] == doctest::Approx(1.5));

    CHECK_THROWS_AS(feasibility_margin(p, DenseVector{0.0}), DimensionMismatch);
}
