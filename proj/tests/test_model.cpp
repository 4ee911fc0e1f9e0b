#include <catch2/catch_amalgamated.hpp>

#include "vdmdp/catalog.hpp"
#include "vdmdp/io.hpp"
#include "vdmdp/model.hpp"
#include "vdmdp/rng.hpp"

#include "test_models.hpp"

using namespace vdmdp;

TEST_CASE("validate: trivial self-loop model is well-formed") {
    const auto m = testmodels::dense({{0.0}}, {{{1.0}}});
    const auto rep = validate_model(m);
    CHECK(rep.ok());
}

TEST_CASE("validate: substochastic row is flagged") {
    auto m = testmodels::dense({{0.0}, {0.0}}, {{{0.5, 0.5}, {0.0, 1.0}}});
    m.row(0, 0) = {{0, 0.4}, {1, 0.5}}; // sums to 0.9
    const auto rep = validate_model(m);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v == "row-stochasticity (0,0)") found = true;
    CHECK(found);
}

TEST_CASE("validate: catalog indicator model is well-formed") {
    CHECK(validate_model(example_indicator(11)).ok());
}

TEST_CASE("validate: kernel row on an infinite-cost pair is flagged") {
    auto m = testmodels::dense({{0.0, kInf}}, {{{1.0}}, {{1.0}}});
    m.row(0, 1) = {{0, 1.0}};
    const auto rep = validate_model(m);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations.front().find("infinite-cost") != std::string::npos);
}

TEST_CASE("validate: empty effective action set is flagged") {
    auto m = testmodels::dense({{0.0}, {0.0}}, {{{0.5, 0.5}, {0.0, 1.0}}});
    m.cost[1][0] = kInf;
    m.row(1, 0) = {};
    const auto rep = validate_model(m);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("empty effective action set at state 1") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validate: metric matrix defects are flagged") {
    auto m = testmodels::dense({{0.0}, {0.0}}, {{{1.0, 0.0}, {0.0, 1.0}}});
    SECTION("asymmetry") {
        m.metric_matrix = {{0.0, 1.0}, {2.0, 0.0}};
        CHECK_FALSE(validate_model(m).ok());
    }
    SECTION("nonzero diagonal") {
        m.metric_matrix = {{0.5, 1.0}, {1.0, 0.0}};
        CHECK_FALSE(validate_model(m).ok());
    }
    SECTION("triangle inequality") {
        auto m3 = testmodels::dense({{0.0}, {0.0}, {0.0}},
                                    {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
        m3.metric_matrix = {{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}};
        CHECK_FALSE(validate_model(m3).ok());
    }
}

TEST_CASE("validate is idempotent and pure") {
    const auto m = example_indicator(7);
    const auto copy = m;
    const auto r1 = validate_model(m);
    const auto r2 = validate_model(m);
    CHECK(r1.violations == r2.violations);
    CHECK(m == copy);
}

TEST_CASE("effective_action_set is exactly the finite-cost support") {
    SECTION("all finite") {
        const auto m = testmodels::dense({{0.1, 0.2}}, {{{1.0}}, {{1.0}}});
        CHECK(effective_action_set(m, 0) == std::vector<int>{0, 1});
    }
    SECTION("one infinite entry excluded") {
        auto m = testmodels::dense({{0.1, 0.2}}, {{{1.0}}, {{1.0}}});
        m.cost[0][1] = kInf;
        m.row(0, 1) = {};
        CHECK(effective_action_set(m, 0) == std::vector<int>{0});
    }
    SECTION("huge finite costs stay available: infinity is a sentinel, not a magnitude") {
        const auto m = testmodels::dense({{0.1, 1e300}}, {{{1.0}}, {{1.0}}});
        CHECK(effective_action_set(m, 0) == std::vector<int>{0, 1});
    }
    SECTION("indicator model has the single action everywhere") {
        const auto m = example_indicator(5);
        for (int x = 0; x < m.num_states(); ++x)
            CHECK(effective_action_set(m, x) == std::vector<int>{0});
    }
}

TEST_CASE("ball semantics on the uniform grid") {
    const auto m = example_indicator(11); // spacing h = 0.1
    const double h = 0.1;
    SECTION("radius below the minimal spacing gives the singleton") {
        CHECK(ball(m, 3, h / 2) == std::vector<int>{3});
    }
    SECTION("radius above the diameter gives every state") {
        CHECK(ball(m, 3, 2.0).size() == 11);
    }
    SECTION("radius 1.5h gives the one-step neighborhood") {
        // expected set computed by direct distance enumeration
        std::vector<int> expected;
        for (int y = 0; y < 11; ++y)
            if (std::fabs(0.3 - y * h) < 1.5 * h) expected.push_back(y);
        CHECK(ball(m, 3, 1.5 * h) == expected);
        CHECK(expected == std::vector<int>{2, 3, 4});
    }
    SECTION("non-positive radius is an argument error") {
        CHECK_THROWS_AS(ball(m, 0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(ball(m, 0, -1.0), std::invalid_argument);
    }
}

TEST_CASE("ball is monotone in the radius") {
    const auto m = random_finite(8, 2, 99);
    SplitMix64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int x = static_cast<int>(rng.next_below(8));
        double r1 = rng.next_double();
        double r2 = rng.next_double();
        if (r1 > r2) std::swap(r1, r2);
        r1 += 1e-6;
        r2 += 1e-6;
        const auto b1 = ball(m, x, r1);
        const auto b2 = ball(m, x, r2);
        for (int y : b1) CHECK(std::find(b2.begin(), b2.end(), y) != b2.end());
    }
}

TEST_CASE("explicit metric matrix wins over coordinates") {
    auto m = testmodels::dense({{0.0}, {0.0}}, {{{1.0, 0.0}, {0.0, 1.0}}});
    // euclidean distance between coords 0 and 1 would be 1
    m.metric_matrix = {{0.0, 7.0}, {7.0, 0.0}};
    REQUIRE(validate_model(m).ok());
    CHECK(m.distance(0, 1) == 7.0);
    CHECK(ball(m, 0, 2.0) == std::vector<int>{0});
    CHECK(ball(m, 0, 8.0).size() == 2);
}

TEST_CASE("min_finite_cost ignores the infinity sentinel") {
    auto m = testmodels::dense({{2.0, kInf}, {3.0, 1.5}},
                               {{{1, 0}, {0, 1}}, {{1, 0}, {0, 1}}});
    m.row(0, 1) = {};
    CHECK(min_finite_cost(m) == 1.5);
    CHECK(max_finite_cost(m) == 3.0);
}

TEST_CASE("model file round trip") {
    SECTION("catalog models round trip exactly") {
        for (const auto& m :
             {example_indicator(9), example_dirichlet(3), random_finite(5, 3, 42)}) {
            const auto loaded = model_from_json(model_to_json(m));
            CHECK(loaded.report.ok());
            CHECK(loaded.model == m);
            // a second trip is byte-identical
            CHECK(model_to_json(loaded.model).dump() == model_to_json(m).dump());
        }
    }
    SECTION("loader normalizes and records the deviation") {
        auto m = testmodels::dense({{0.0}, {0.0}}, {{{0.5, 0.5}, {0.0, 1.0}}});
        auto j = model_to_json(m);
        j["kernel"]["0,0"] = {{{"state", 0}, {"prob", 0.45}}, {{"state", 1}, {"prob", 0.45}}};
        const auto loaded = model_from_json(j);
        CHECK(loaded.report.ok()); // normalized away
        bool recorded = false;
        for (double d : loaded.report.row_deviations)
            if (std::fabs(d - 0.1) < 1e-12) recorded = true;
        CHECK(recorded);
        double sum = 0.0;
        for (const auto& e : loaded.model.row(0, 0)) sum += e.prob;
        CHECK(sum == Catch::Approx(1.0).margin(1e-15));
    }
    SECTION("infinite cost entries serialize as the string sentinel") {
        auto m = testmodels::dense({{0.0, kInf}}, {{{1.0}}, {{1.0}}});
        m.row(0, 1) = {};
        const auto j = model_to_json(m);
        CHECK(j["cost"][0][1] == "inf");
        const auto loaded = model_from_json(j);
        CHECK(loaded.model.cost[0][1] == kInf);
    }
    SECTION("malformed documents raise parse errors") {
        CHECK_THROWS_AS(model_from_json(json::parse("{}")), parse_error);
        auto j = model_to_json(example_indicator(3));
        j["cost"][0][0] = "oops";
        CHECK_THROWS_AS(model_from_json(j), parse_error);
    }
}

TEST_CASE("policy file round trip and feasibility") {
    const auto m = example_indicator(4);
    Policy p;
    p.action_of = {0, 0, 0, 0};
    CHECK(first_infeasible_state(m, p) == -1);
    const auto q = policy_from_json(policy_to_json(p));
    CHECK(q == p);
    Policy bad;
    bad.action_of = {0, 1, 0, 0};
    CHECK(first_infeasible_state(m, bad) == 1);
}
