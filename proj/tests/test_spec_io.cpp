#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robustmd/problem_spec.hpp"
#include "robustmd/report.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace robustmd;
using nlohmann::json;

namespace {

const char* kSpecs[] = {
    R"({"command": "guarantee", "grid": {"spacing": 0.0025},
        "value": {"type": "postedPrice", "price": 0.4},
        "ambiguity": {"type": "median", "median": 0.4}})",
    R"({"command": "check-robust", "grid": {"lo": 0, "hi": 2, "spacing": 0.005, "extra": [0.37]},
        "value": {"type": "bergemannSchlag", "thetaBar": 0.5, "objective": "negRegret"},
        "ambiguity": {"type": "support", "lo": 0.5, "hi": 1, "radius": 0.003},
        "options": {"tol": 0.001, "levels": 3, "witnesses": 2}})",
    R"({"command": "guarantee",
        "value": {"type": "priceCdf", "atoms": [[0.3, 0.5], [0.7, 0.5]]},
        "ambiguity": {"type": "moments", "moments": [{"kind": "power", "power": 1, "lo": 0.4, "hi": 0.4},
                                                     {"kind": "indicator", "a": 0.2, "b": 0.5, "hi": 0.5}]}})",
    R"({"command": "check-robust",
        "value": {"type": "persuasion", "alpha": 0.3},
        "ambiguity": {"type": "supportMean", "lo": 0.3, "hi": 0.6, "mean": 0.4}})",
    R"({"command": "guarantee",
        "value": {"type": "table", "theta": [0, 0.5], "values": [1, -1]},
        "ambiguity": {"type": "singleton", "atoms": [[0.5, 1]], "radius": 0.1}})",
    R"({"command": "guarantee",
        "value": {"type": "postedPrice", "price": 0.5, "objective": "revenue"},
        "ambiguity": {"type": "quantile", "pairs": [[0.25, 0.25], [0.5, 0.5]]}})",
    R"({"command": "guarantee",
        "value": {"type": "postedPrice", "price": 0.5},
        "ambiguity": {"type": "halfSpace", "level": 0.1}})",
    R"({"command": "robustify", "options": {"thetaBar": 0.5, "radius": 0.006}})",
    R"({"command": "figure", "options": {"figure": "fig4"}})",
};

} // namespace

TEST_CASE("specs round-trip") {
    for (const char* text : kSpecs) {
        const ProblemSpec a = parse_problem_spec(text);
        const std::string once = serialize(a);
        const ProblemSpec b = parse_problem_spec(once);
        CHECK(serialize(b) == once);
        CHECK(json::parse(once) == json::parse(serialize(b)));
    }
}

TEST_CASE("defaults are recorded") {
    const auto j = json::parse(serialize(parse_problem_spec(kSpecs[0])));
    CHECK(j["options"]["tol"] == 1e-4);
    CHECK(j["options"]["levels"] == 2);
    CHECK(j["grid"]["hi"] == 1.0);
}

TEST_CASE("malformed specs are rejected") {
    const char* bad[] = {
        "not json",
        R"({"command": "guess"})",
        R"({"command": "guarantee"})",
        R"({"command": "guarantee", "value": {"type": "postedPrice", "price": 0.4, "colour": 1},
            "ambiguity": {"type": "median", "median": 0.4}})",
        R"({"command": "guarantee", "value": {"type": "postedPrice"}, "ambiguity": {"type": "median", "median": 0.4}})",
        R"({"command": "guarantee", "value": {"type": "postedPrice", "price": "high"},
            "ambiguity": {"type": "median", "median": 0.4}})",
        R"({"command": "guarantee", "value": {"type": "postedPrice", "price": 0.4},
            "ambiguity": {"type": "support", "lo": 0.5, "hi": 1, "radius": -1}})",
        R"({"command": "guarantee", "grid": {"spacing": 0}, "value": {"type": "postedPrice", "price": 0.4},
            "ambiguity": {"type": "median", "median": 0.4}})",
        R"({"command": "guarantee", "value": {"type": "table", "theta": [0, 0.5], "values": [1]},
            "ambiguity": {"type": "median", "median": 0.4}})",
        R"({"command": "robustify", "options": {"levels": 0}})",
    };
    for (const char* text : bad) CHECK_THROWS_AS(parse_problem_spec(text), SpecError);
}

TEST_CASE("spec builds the grid, value and set") {
    const ProblemSpec s = parse_problem_spec(kSpecs[1]);
    const auto grid = build_grid(s);
    CHECK(grid->index_of(0.37) >= 0);
    CHECK(grid->index_of(std::exp(-1.0)) >= 0);
    const auto v = build_value(*s.value, grid);
    const auto set = build_ambiguity(*s.ambiguity, grid, v);
    CHECK(set.is_ball());
    CHECK(*set.radius == 0.003);

    const ProblemSpec t = parse_problem_spec(kSpecs[4]);
    const auto tg = build_grid(t);
    const auto tv = build_value(*t.value, tg);
    CHECK(tv[static_cast<std::size_t>(tg->index_of(0.25))] == 1.0);
    CHECK(tv[static_cast<std::size_t>(tg->index_of(0.5))] == -1.0);
}

TEST_CASE("number and CSV formatting") {
    CHECK(format_number(0.2) == "0.2");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK_THROWS(format_number(std::nan("")));
    CsvTable t;
    t.add("theta", {0.0, 0.5});
    t.add("value", {1.0, 2.0 / 3.0});
    CHECK(format_csv(t) == "theta,value\n0,1\n0.5,0.666666667\n");
    CHECK_THROWS(t.add("short", {1.0}));
}

TEST_CASE("finite check and atomic writes") {
    CHECK(all_finite(json{{"a", 1.0}, {"b", {1, 2, 3}}}));
    CHECK_FALSE(all_finite(json{{"a", std::numeric_limits<double>::infinity()}}));

    const auto dir = std::filesystem::temp_directory_path() / "robustmd_spec_io_test";
    std::filesystem::remove_all(dir);
    CsvTable good;
    good.add("theta", {0.0});
    CsvTable bad;
    bad.add("theta", {std::nan("")});
    CHECK_THROWS(write_outputs(dir, json{{"x", 1}}, {{"good", good}, {"bad", bad}}));
    CHECK_FALSE(std::filesystem::exists(dir / "good.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "bad.csv"));
    write_outputs(dir, json{{"x", 1}}, {{"good", good}});
    CHECK(std::filesystem::exists(dir / "good.csv"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    std::filesystem::remove_all(dir);
}
