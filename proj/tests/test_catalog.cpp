#include <catch2/catch_amalgamated.hpp>

#include "vdmdp/catalog.hpp"
#include "vdmdp/discounted.hpp"
#include "vdmdp/io.hpp"
#include "vdmdp/vanish.hpp"

#include "oracles.hpp"

using namespace vdmdp;

TEST_CASE("example_indicator") {
    SECTION("smallest grid") {
        const auto m = example_indicator(2);
        REQUIRE(m.num_states() == 2);
        CHECK(m.cost[0][0] == 0.0);
        CHECK(m.cost[1][0] == 1.0);
        for (int x = 0; x < 2; ++x) {
            REQUIRE(m.row(x, 0).size() == 1);
            CHECK(m.row(x, 0)[0].state == 0);
            CHECK(m.row(x, 0)[0].prob == 1.0);
        }
        CHECK(m.continuity_class == ContinuityClass::WeakStar);
    }
    SECTION("discounted value is the indicator at grid 101") {
        const auto m = example_indicator(101);
        const auto v = discounted_value_iteration(m, 0.9, 1e-10);
        for (int x = 0; x < 101; ++x)
            CHECK(v.values[x] == Catch::Approx(x == 0 ? 0.0 : 1.0).margin(1e-12));
    }
    SECTION("validates for a range of sizes") {
        for (int g : {2, 3, 17, 101}) CHECK(validate_model(example_indicator(g)).ok());
        CHECK_THROWS_AS(example_indicator(1), std::invalid_argument);
    }
}

TEST_CASE("example_dirichlet") {
    SECTION("one pair gives three states with costs 0,1,0") {
        const auto m = example_dirichlet(1);
        REQUIRE(m.num_states() == 3);
        CHECK(m.cost[0][0] == 0.0);
        CHECK(m.cost[1][0] == 1.0);
        CHECK(m.cost[2][0] == 0.0);
        CHECK(m.states[0].label == "rational");
        CHECK(m.states[1].label == "irrational");
        CHECK(m.continuity_class == ContinuityClass::SetwiseStar);
    }
    SECTION("discounted value equals the label cost exactly") {
        for (int np : {1, 4}) {
            const auto m = example_dirichlet(np);
            const auto v = discounted_value_iteration(m, 0.99, 1e-10);
            for (int x = 0; x < m.num_states(); ++x)
                CHECK(v.values[x] == Catch::Approx(m.cost[x][0]).margin(1e-12));
        }
    }
    SECTION("every irrational-labeled state has a rational-labeled nearest neighbor") {
        for (int np : {1, 2, 5}) {
            const auto m = example_dirichlet(np);
            for (int x = 0; x < m.num_states(); ++x) {
                if (m.states[x].label != "irrational") continue;
                const double d_nn = m.nearest_neighbor_distance(x);
                bool rational_at_nn = false;
                for (int y = 0; y < m.num_states(); ++y)
                    if (y != x && m.distance(x, y) <= d_nn &&
                        m.states[y].label == "rational")
                        rational_at_nn = true;
                CHECK(rational_at_nn);
            }
            CHECK(validate_model(m).ok());
        }
        CHECK_THROWS_AS(example_dirichlet(0), std::invalid_argument);
    }
}

TEST_CASE("random_finite") {
    SECTION("single state: the average cost is the cheapest action") {
        const auto m = random_finite(1, 3, 5);
        double best = kInf;
        for (int a = 0; a < 3; ++a) best = std::min(best, m.cost[0][a]);
        const auto diag = run_vanish_pipeline(m, geometric_schedule(0.5, 12), 1e-10,
                                              "pointwise");
        CHECK(diag.w_star_estimate == Catch::Approx(best).margin(1e-9));
    }
    SECTION("same seed, same bytes; different seed, different model") {
        const auto a = model_to_json(random_finite(4, 3, 77)).dump();
        const auto b = model_to_json(random_finite(4, 3, 77)).dump();
        const auto c = model_to_json(random_finite(4, 3, 78)).dump();
        CHECK(a == b);
        CHECK(a != c);
    }
    SECTION("kernel rows are strictly positive and normalized") {
        const auto m = random_finite(6, 4, 123, 0.9);
        for (int x = 0; x < 6; ++x)
            for (int a = 0; a < 4; ++a) {
                double sum = 0.0;
                for (const auto& e : m.row(x, a)) {
                    CHECK(e.prob > 0.01); // uniform floor keeps chains mixing
                    sum += e.prob;
                }
                CHECK(sum == Catch::Approx(1.0).margin(1e-12));
            }
        CHECK(validate_model(m).ok());
    }
    SECTION("pipeline average cost matches the policy-enumeration oracle") {
        const auto m = random_finite(4, 3, 7);
        const auto diag = run_vanish_pipeline(m, geometric_schedule(0.5, 30), 1e-10,
                                              "pointwise");
        const auto avg = oracle::best_average(m);
        CHECK(diag.w_star_estimate == Catch::Approx(avg.w_star).margin(1e-6));
        CHECK(diag.w_upper_seq == Catch::Approx(avg.w_star).margin(1e-6));
    }
    SECTION("argument validation") {
        CHECK_THROWS_AS(random_finite(0, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(random_finite(1, 1, 1, 2.0), std::invalid_argument);
    }
}
