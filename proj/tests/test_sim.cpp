#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vdmdp/catalog.hpp"
#include "vdmdp/sim.hpp"

#include "oracles.hpp"
#include "test_models.hpp"

using namespace vdmdp;

namespace {

Policy only_action(const MdpModel& m) {
    Policy p;
    p.action_of.assign(m.num_states(), 0);
    return p;
}

} // namespace

TEST_CASE("trajectories are bit-reproducible") {
    const auto m = random_finite(5, 2, 9);
    Policy phi;
    phi.action_of = {0, 1, 0, 1, 0};
    const auto t1 = simulate_trajectory(m, phi, 2, 500, 42);
    const auto t2 = simulate_trajectory(m, phi, 2, 500, 42);
    REQUIRE(t1.steps.size() == t2.steps.size());
    for (std::size_t i = 0; i < t1.steps.size(); ++i) {
        CHECK(t1.steps[i].state == t2.steps[i].state);
        CHECK(t1.steps[i].cost == t2.steps[i].cost);
    }
    const auto t3 = simulate_trajectory(m, phi, 2, 500, 43);
    bool differs = false;
    for (std::size_t i = 0; i < t1.steps.size(); ++i)
        if (t1.steps[i].state != t3.steps[i].state) differs = true;
    CHECK(differs);
}

TEST_CASE("trajectory steps follow the cost table and the kernel support") {
    const auto m = random_finite(4, 2, 10);
    Policy phi;
    phi.action_of = {1, 0, 1, 0};
    const auto t = simulate_trajectory(m, phi, 0, 200, 7);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& s = t.steps[i];
        CHECK(s.action == phi.action_of[s.state]);
        CHECK(s.cost == m.cost[s.state][s.action]);
        if (i + 1 < t.steps.size()) {
            bool in_support = false;
            for (const auto& e : m.row(s.state, s.action))
                if (e.prob > 0.0 && e.state == t.steps[i + 1].state) in_support = true;
            CHECK(in_support);
        }
    }
}

TEST_CASE("estimates are deterministic given the seed") {
    const auto m = random_finite(4, 2, 30);
    const auto phi = only_action(m);
    const auto e1 = simulate_average_cost(m, phi, 0, 5000, 6, 17);
    const auto e2 = simulate_average_cost(m, phi, 0, 5000, 6, 17);
    CHECK(e1.cesaro == e2.cesaro);
    CHECK(e1.mean == e2.mean);
    CHECK(e1.limsup_proxy == e2.limsup_proxy);
    const auto e4 = simulate_average_cost(m, phi, 0, 5000, 6, 17, 4);
    CHECK(e1.cesaro == e4.cesaro); // threads only change throughput
}

TEST_CASE("zero-cost model estimates exactly zero") {
    const auto m = testmodels::zero_cost(3);
    const auto est = simulate_average_cost(m, only_action(m), 1, 1000, 4, 5);
    CHECK(est.mean == 0.0);
    CHECK(est.std_error == 0.0);
    CHECK(est.limsup_proxy == 0.0);
}

TEST_CASE("indicator model: one unit of cost washes out in the Cesaro average") {
    const auto m = example_indicator(21);
    for (int x0 : {1, 7, 20}) {
        const auto est = simulate_average_cost(m, only_action(m), x0, 10000, 3, 11);
        CHECK(est.mean <= 1.0 / 10000 + 1e-15);
        CHECK(est.mean >= 0.0);
    }
}

TEST_CASE("unichain estimate agrees with the stationary oracle at 3 sigma") {
    const auto m = testmodels::two_state_chain(0.3, 0.4, 0.5, 2.0);
    const auto phi = only_action(m);
    const double g = oracle::average_cost(m, phi);
    const auto est = simulate_average_cost(m, phi, 0, 100000, 12, 2025);
    const double tol = 3.0 * est.std_error + 2e-4; // 3 sigma + O(1/N) transient
    CHECK(std::fabs(est.mean - g) <= tol);
}

TEST_CASE("replications are independent streams") {
    const auto m = random_finite(3, 2, 44);
    const auto phi = only_action(m);
    const long horizon = 2000;
    const auto est = simulate_average_cost(m, phi, 0, horizon, 5, 123);
    for (int r = 0; r < 5; ++r) {
        const auto traj = simulate_trajectory(m, phi, 0, horizon, 123ull ^ mix64(r));
        double total = 0.0;
        for (const auto& s : traj.steps) total += s.cost;
        CHECK(est.cesaro[r] == total / horizon);
    }
}

TEST_CASE("tauberian check") {
    SECTION("constant cost: both sides equal the cost") {
        const auto m = testmodels::constant_cost(3, 1.0);
        const auto res = tauberian_check(m, only_action(m), 0, geometric_schedule(0.5, 20),
                                         20000, 4, 3);
        CHECK(res.pass);
        for (double lhs : res.lhs) CHECK(lhs == Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("dirichlet model: the discounted side vanishes") {
        const auto m = example_dirichlet(3);
        const auto res = tauberian_check(m, only_action(m), 1, geometric_schedule(0.5, 30),
                                         5000, 4, 3);
        CHECK(res.pass);
        for (double lhs : res.lhs) CHECK(lhs <= 1e-5); // tail starts at 1-alpha ~ 2e-7
    }
    SECTION("random unichain: inequality holds across the tail window") {
        const auto m = random_finite(5, 3, 314);
        Policy phi;
        phi.action_of = {0, 1, 2, 0, 1};
        const auto res = tauberian_check(m, phi, 0, geometric_schedule(0.5, 24), 100000,
                                         8, 77);
        CHECK(res.pass);
    }
}

TEST_CASE("simulation argument errors") {
    const auto m = example_indicator(5);
    const auto phi = only_action(m);
    CHECK_THROWS_AS(simulate_average_cost(m, phi, 0, 0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_average_cost(m, phi, 9, 10, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_average_cost(m, phi, 0, 10, 0, 1), std::invalid_argument);
    Policy bad;
    bad.action_of.assign(5, 3);
    CHECK_THROWS_AS(simulate_trajectory(m, bad, 0, 10, 1), std::invalid_argument);
}
