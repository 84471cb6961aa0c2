#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "robustmd/optim.hpp"

#include <cmath>
#include <random>

using namespace robustmd;

TEST_CASE("textbook LP with mixed rows") {
    // min -x - 2y s.t. x + y <= 4, x - y >= -2, x <= 3
    LinearProgram lp(2);
    lp.objective = {-1.0, -2.0};
    lp.add_row({1.0, 1.0}, Relation::LessEqual, 4.0);
    lp.add_row({1.0, -1.0}, Relation::GreaterEqual, -2.0);
    lp.upper = {3.0, std::numeric_limits<double>::infinity()};
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(-7.0));
    CHECK(sol.x[0] == doctest::Approx(1.0));
    CHECK(sol.x[1] == doctest::Approx(3.0));
    const auto d = diagnose(lp, sol);
    CHECK(d.primal_residual < 1e-9);
    CHECK(d.dual_residual < 1e-9);
    CHECK(d.complementarity < 1e-9);
    CHECK(d.dual_value == doctest::Approx(sol.value));
}

TEST_CASE("infeasible and unbounded problems") {
    LinearProgram bad(2);
    bad.objective = {1.0, 1.0};
    bad.add_row({1.0, 1.0}, Relation::LessEqual, 1.0);
    bad.add_row({1.0, 1.0}, Relation::GreaterEqual, 2.0);
    CHECK(solve_lp(bad).status == LpStatus::Infeasible);

    LinearProgram open(2);
    open.objective = {-1.0, 0.0};
    open.add_row({1.0, -1.0}, Relation::LessEqual, 1.0);
    CHECK(solve_lp(open).status == LpStatus::Unbounded);
}

TEST_CASE("cycling example terminates") {
    // Beale's example, which cycles under the plain largest-coefficient rule.
    LinearProgram lp(4);
    lp.objective = {-0.75, 150.0, -0.02, 6.0};
    lp.add_row({0.25, -60.0, -0.04, 9.0}, Relation::LessEqual, 0.0);
    lp.add_row({0.5, -90.0, -0.02, 3.0}, Relation::LessEqual, 0.0);
    lp.add_row({0.0, 0.0, 1.0, 0.0}, Relation::LessEqual, 1.0);
    LpOptions opts;
    opts.degenerate_switch = 5;
    const auto sol = solve_lp(lp, opts);
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(-0.05));
}

TEST_CASE("random LPs agree with vertex enumeration") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 60; ++it) {
        const auto lp = oracle::random_lp(rng);
        const auto ref = oracle::vertex_enumeration(lp);
        const auto sol = solve_lp(lp);
        if (!ref) {
            CHECK(sol.status == LpStatus::Infeasible);
            continue;
        }
        REQUIRE(sol.optimal());
        CHECK(std::abs(sol.value - *ref) <= 1e-8);
        const auto d = diagnose(lp, sol);
        CHECK(d.primal_residual < 1e-8);
        CHECK(std::abs(d.dual_value - sol.value) < 1e-8);
    }
}

TEST_CASE("parallel and serial pivoting give the same answer") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 20; ++it) {
        const auto lp = oracle::random_lp(rng);
        LpOptions serial;
        serial.parallel = false;
        const auto a = solve_lp(lp), b = solve_lp(lp, serial);
        CHECK(a.status == b.status);
        if (a.optimal()) CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    }
}

TEST_CASE("bisection") {
    const auto r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12);
    CHECK(r.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
    CHECK(r.iterations > 0);
    CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), std::invalid_argument);
}
