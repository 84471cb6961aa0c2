#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robustmd/guarantee.hpp"

#include <cmath>
#include <random>

using namespace robustmd;

TEST_CASE("support interval worst case is the minimum over the interval") {
    const auto g = Grid::uniform(0.0, 1.0, 0.01);
    const auto v = ValueFunction::from_function(g, [](double t) { return std::sin(6.0 * t); });
    const auto rep = worst_case(v, AmbiguitySet(SupportInterval{0.1, 0.4}));
    REQUIRE(rep.optimal());
    double m = 1e9;
    for (std::size_t i = 0; i < g->size(); ++i)
        if ((*g)[i] >= 0.1 - 1e-12 && (*g)[i] <= 0.4 + 1e-12) m = std::min(m, v[i]);
    CHECK(rep.value == doctest::Approx(m));
    CHECK(!rep.active_constraints.empty());
}

TEST_CASE("singleton and infeasible sets") {
    const auto g = Grid::uniform(0.0, 1.0, 0.1);
    const auto v = ValueFunction::from_function(g, [](double t) { return t; });
    const auto p = DiscretePrior::uniform(g);
    CHECK(worst_case(v, AmbiguitySet(Singleton{p})).value == doctest::Approx(0.5));
    LinearSet impossible;
    impossible.rows.push_back({v, 2.0, 3.0});
    CHECK(worst_case(v, AmbiguitySet(impossible)).status == LpStatus::Infeasible);
}

TEST_CASE("mean set: worst case of a convex function is its value at the mean") {
    const auto g = Grid::uniform(0.0, 1.0, 0.05);
    const auto v = ValueFunction::from_function(g, [](double t) { return (t - 0.3) * (t - 0.3); });
    const auto rep = worst_case(v, AmbiguitySet(mean_set(g, 0.6)));
    CHECK(rep.value == doctest::Approx(0.09));
}

TEST_CASE("ball formulations agree") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto g = Grid::uniform(0.0, 1.0, 1.0 / 40.0);
    for (int it = 0; it < 10; ++it) {
        std::vector<double> vals(g->size());
        for (auto& x : vals) x = u(rng);
        const ValueFunction v(g, vals);
        const SupportInterval s{0.3, 0.6};
        const double r = 0.02 + 0.1 * std::abs(u(rng));
        const auto a = worst_case_ball(v, s, r, BallMethod::ClosedForm);
        const auto b = worst_case_ball(v, s, r, BallMethod::Coupling);
        const auto c = worst_case_ball(v, s, r);
        REQUIRE(a.optimal());
        REQUIRE(b.optimal());
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
        REQUIRE(c.cross_check);
        CHECK(*c.cross_check < 1e-9);
        CHECK(contains(AmbiguitySet::ball(s, r), *a.worst_prior, 1e-7));
        CHECK(contains(AmbiguitySet::ball(s, r), *b.worst_prior, 1e-7));
    }
}

TEST_CASE("ball around a mean set and around a singleton") {
    const auto g = Grid::uniform(0.0, 1.0, 0.05);
    const auto v = ValueFunction::from_function(g, [](double t) { return t; });
    // Moving mass left costs exactly what it saves.
    CHECK(worst_case_ball(v, mean_set(g, 0.5), 0.1).value == doctest::Approx(0.4));
    CHECK(worst_case_ball(v, Singleton{DiscretePrior::point_mass(g, 10)}, 0.2).value == doctest::Approx(0.3));
    CHECK(worst_case_ball(v, mean_set(g, 0.5), 0.0).value == doctest::Approx(0.5));
    CHECK_THROWS(worst_case_ball(v, mean_set(g, 0.5), -0.1));
    CHECK_THROWS(worst_case_ball(v, mean_set(g, 0.5), 0.1, BallMethod::ClosedForm));
}

TEST_CASE("coupling LP refuses large grids") {
    const auto g = Grid::uniform(0.0, 1.0, 1.0 / 300.0);
    const auto v = ValueFunction::constant(g, 1.0);
    CHECK_THROWS_AS(worst_case_ball(v, mean_set(g, 0.5), 0.1), std::invalid_argument);
    CHECK_NOTHROW(worst_case_ball(v, SupportInterval{0.2, 0.4}, 0.1));
}

TEST_CASE("strong duality with the transport penalty") {
    // V(r) = max over lambda >= 0 of variational_value(lambda) - lambda r.
    const auto g = Grid::uniform(0.0, 1.0, 0.05);
    const auto v = ValueFunction::from_function(g, [](double t) { return t < 0.5 ? 1.0 - 2.0 * t : 0.2 * t; });
    for (const BaseSet& base : {BaseSet(SupportInterval{0.0, 0.3}), BaseSet(mean_set(g, 0.2))}) {
        const double r = 0.05;
        const double primal = worst_case_ball(v, base, r).value;
        double dual = -1e9;
        for (int k = 0; k <= 400; ++k) {
            const double lambda = 0.025 * k;
            dual = std::max(dual, variational_value(v, base, lambda) - lambda * r);
        }
        CHECK(dual <= primal + 1e-9);
        CHECK(dual == doctest::Approx(primal).epsilon(1e-3));
    }
    CHECK(variational_value(v, SupportInterval{0.0, 0.3}, 0.0) == doctest::Approx(v.min()));
}

TEST_CASE("radius sweep") {
    const auto g = Grid::uniform(0.0, 1.0, 0.01);
    const auto v = ValueFunction::from_function(g, [](double t) { return t < 0.5 ? 1.0 : 0.0; });
    std::vector<double> radii{0.01, 0.02, 0.05, 0.1};
    const auto s = radius_sweep(v, SupportInterval{0.6, 0.9}, radii);
    CHECK(s.nonincreasing);
    CHECK(s.equicontinuity_violations == 0);
    CHECK(s.curve.size() == 4);
    CHECK_THROWS(radius_sweep(v, SupportInterval{0.6, 0.9}, {0.1, 0.05}));
    CHECK_THROWS(radius_sweep(v, SupportInterval{0.6, 0.9}, {0.0, 0.05}));
}
