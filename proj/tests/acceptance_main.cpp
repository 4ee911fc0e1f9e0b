// Acceptance suite: end-to-end checks of the toolkit against its closed-form
// examples, oracle models, and determinism requirements. Prints one line per
// criterion; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "vdmdp/catalog.hpp"
#include "vdmdp/discounted.hpp"
#include "vdmdp/io.hpp"
#include "vdmdp/sim.hpp"
#include "vdmdp/vanish.hpp"
#include "vdmdp/verify.hpp"

#include "oracles.hpp"

using namespace vdmdp;

namespace {

int failures = 0;

struct Criterion {
    std::string detail;
    bool ok = true;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

void run_criterion(int number, const std::string& name,
                   const std::function<void(Criterion&)>& body) {
    Criterion c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail = std::string("exception: ") + e.what();
    }
    if (c.ok) {
        std::printf("[PASS] criterion %d: %s\n", number, name.c_str());
    } else {
        std::printf("[FAIL] criterion %d: %s -- %s\n", number, name.c_str(),
                    c.detail.c_str());
        ++failures;
    }
    std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct NamedModel {
    std::string name;
    MdpModel model;
};

std::vector<NamedModel> catalog_suite() {
    std::vector<NamedModel> out;
    out.push_back({"indicator(101)", example_indicator(101)});
    out.push_back({"dirichlet(7)", example_dirichlet(7)});
    const int sizes[5][2] = {{3, 2}, {4, 3}, {5, 4}, {6, 4}, {6, 3}};
    for (int i = 0; i < 20; ++i)
        out.push_back({"random(seed=" + std::to_string(101 + i) + ")",
                       random_finite(sizes[i % 5][0], sizes[i % 5][1], 101 + i)});
    return out;
}

const DiscountSchedule kSchedule = geometric_schedule(0.5, 30);
constexpr double kSolverTol = 1e-10;

} // namespace

int main() {
    // ------------------------------------------------------------------ 1
    run_criterion(1, "indicator model exactness (values, limits, ACOE)", [](Criterion& c) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = example_indicator(101);
        for (double alpha : {0.5, 0.9, 0.999}) {
            const auto v = discounted_value_iteration(m, alpha, kSolverTol);
            for (int x = 0; x < 101; ++x) {
                const double expect = x == 0 ? 0.0 : 1.0;
                c.require(std::fabs(v.values[x] - expect) <= 1e-9,
                          "v_alpha deviates at alpha=" + std::to_string(alpha));
            }
        }
        const auto diag = run_vanish_pipeline(m, kSchedule, kSolverTol, "weak");
        c.require(std::fabs(diag.w_upper_seq) <= 1e-9, "w_upper_seq not 0");
        c.require(diag.u.values[0] == 0.0, "weak u(0) != 0");
        for (int x = 1; x < 101; ++x)
            c.require(diag.u.values[x] == 1.0, "weak u not the indicator");
        const auto acoe = check_acoe(m, diag.u, 0.0, 1e-9).first;
        c.require(acoe.pass && acoe.residual <= 1e-9,
                  "ACOE residual " + fmt_g17(acoe.residual));
        c.require(seconds_since(t0) <= 10.0, "runtime exceeded seconds-scale budget");
    });

    // ------------------------------------------------------------------ 2
    run_criterion(2, "indicator model assumption profile (LSE yes, EC no, AUI yes)",
                  [](Criterion& c) {
        const auto m = example_indicator(101);
        const auto diag = sequence_diagnostics(m, kSchedule, kSolverTol);
        const auto fam = trace_family(diag);
        const std::vector<double> eps = {0.5, 0.1};
        const auto lse = check_lower_semi_equicontinuity(fam, m, eps);
        c.require(lse.pass, "lower semi-equicontinuity should pass at every state");
        const auto ec = check_equicontinuity(fam, m, eps);
        c.require(!ec.state_pass[0], "equicontinuity should fail at x = 0");
        c.require(!ec.upper.state_pass[0], "the failure at 0 is on the upper side");
        const auto ui = check_asymptotic_ui(fam, m, {2.0, 4.0, 8.0}, diag.tail_window);
        c.require(ui.result.pass, "asymptotic UI should pass");
        for (double t : ui.tail_integral)
            c.require(t == 0.0, "T(K) should vanish for K >= 2");
    });

    // ------------------------------------------------------------------ 3
    run_criterion(3, "dirichlet model exactness and assumption profile", [](Criterion& c) {
        const auto m = example_dirichlet(7);
        for (double alpha : {0.5, 0.9, 0.999}) {
            const auto v = discounted_value_iteration(m, alpha, kSolverTol);
            for (int x = 0; x < m.num_states(); ++x)
                c.require(std::fabs(v.values[x] - m.cost[x][0]) <= 1e-9,
                          "v_alpha deviates from the label cost");
        }
        std::vector<double> u(m.num_states());
        for (int x = 0; x < m.num_states(); ++x) u[x] = m.cost[x][0];
        ValueFunction uf;
        uf.values = u;
        const auto acoe = check_acoe(m, uf, 0.0, 1e-15).first;
        c.require(acoe.residual == 0.0, "ACOE residual must be exactly 0");
        const auto diag = sequence_diagnostics(m, kSchedule, kSolverTol);
        const auto fam = trace_family(diag);
        const auto lse = check_lower_semi_equicontinuity(fam, m, {0.5, 0.1});
        for (int x = 0; x < m.num_states(); ++x) {
            if (m.states[x].label == "irrational")
                c.require(!lse.state_pass[x],
                          "LSE should fail at irrational-labeled state " + std::to_string(x));
            else
                c.require(lse.state_pass[x],
                          "LSE should hold at rational-labeled state " + std::to_string(x));
        }
        c.require(check_pointwise_limit(diag, 1e-9).pass, "LEC(ii) evidence should pass");
        const auto ui = check_asymptotic_ui(fam, m, {2.0, 4.0}, diag.tail_window);
        c.require(ui.result.pass && ui.tail_integral.back() == 0.0,
                  "LEC(iii) evidence should pass");
    });

    // ------------------------------------------------------------------ 4
    run_criterion(4, "oracle equivalence on 20 seeded random models", [](Criterion& c) {
        const auto t0 = std::chrono::steady_clock::now();
        const int sizes[5][2] = {{3, 2}, {4, 3}, {5, 4}, {6, 4}, {6, 3}};
        for (int i = 0; i < 20; ++i) {
            const auto m = random_finite(sizes[i % 5][0], sizes[i % 5][1], 101 + i);
            const auto diag = run_vanish_pipeline(m, kSchedule, kSolverTol, "pointwise");
            const auto avg = oracle::best_average(m);
            c.require(std::fabs(diag.w_upper_seq - avg.w_star) <= 1e-5,
                      "analytic mismatch at seed " + std::to_string(101 + i) + ": " +
                          fmt_g17(diag.w_upper_seq) + " vs " + fmt_g17(avg.w_star));
            const auto est = simulate_average_cost(m, diag.policy, 0, 30000, 12, 4242);
            c.require(std::fabs(est.mean - avg.w_star) <= 3.0 * est.std_error,
                      "simulated mismatch at seed " + std::to_string(101 + i) + ": " +
                          fmt_g17(est.mean) + " vs " + fmt_g17(avg.w_star) +
                          " (3se=" + fmt_g17(3.0 * est.std_error) + ")");
        }
        c.require(seconds_since(t0) <= 60.0, "runtime exceeded one minute");
    });

    // ------------------------------------------------------------------ 5
    run_criterion(5, "inequality chain on every catalog model", [](Criterion& c) {
        for (const auto& nm : catalog_suite()) {
            const auto diag = run_vanish_pipeline(nm.model, kSchedule, kSolverTol,
                                                  "pointwise");
            for (const auto& link : check_chain(diag, diag.w_star_estimate, 1e-9))
                c.require(link.pass, nm.name + ": " + link.name + " residual " +
                                         fmt_g17(link.residual));
        }
    });

    // ------------------------------------------------------------------ 6
    run_criterion(6, "iterated bound v_{N,1} <= N w_upper + u for N <= 100",
                  [](Criterion& c) {
        for (const auto& nm : catalog_suite()) {
            const auto diag = run_vanish_pipeline(nm.model, kSchedule, kSolverTol,
                                                  "pointwise");
            const auto wacoi =
                check_wacoi(nm.model, diag.policy, diag.u, diag.w_upper_seq,
                            schedule_aware_tol(diag, diag.w_upper_seq, diag.u.values));
            if (!wacoi.pass) continue; // criterion applies where WACOI holds
            const auto t1 = check_theorem1_conclusions(nm.model, diag.policy, diag.u,
                                                       diag, 100, 1e-7);
            c.require(t1.iterated_bound.pass,
                      nm.name + ": bound residual " + fmt_g17(t1.iterated_bound.residual));
        }
    });

    // ------------------------------------------------------------------ 7
    run_criterion(7, "transformed DCOE residual within 10x solver tolerance",
                  [](Criterion& c) {
        for (const auto& nm : catalog_suite()) {
            const auto diag = sequence_diagnostics(nm.model, kSchedule, kSolverTol);
            const auto r = check_transform_dcoe(nm.model, diag, 10.0 * kSolverTol);
            c.require(r.pass, nm.name + ": residual " + fmt_g17(r.residual));
        }
    });

    // ------------------------------------------------------------------ 8
    run_criterion(8, "weak-construction u <= pointwise-construction u, exactly",
                  [](Criterion& c) {
        const std::vector<DiscountSchedule> schedules = {
            kSchedule, harmonic_schedule(20), geometric_schedule(0.7, 24)};
        for (const auto& nm : catalog_suite()) {
            for (const auto& s : schedules) {
                const auto diag = sequence_diagnostics(nm.model, s, kSolverTol);
                const auto weak = limit_relative_value_weak(diag, nm.model);
                const auto pw = limit_relative_value_pointwise(diag);
                for (int x = 0; x < nm.model.num_states(); ++x)
                    c.require(weak.u.values[x] <= pw.values[x],
                              nm.name + ": ordering fails at state " + std::to_string(x));
            }
        }
    });

    // ------------------------------------------------------------------ 9
    run_criterion(9, "determinism: repeated and parallel runs are identical",
                  [](Criterion& c) {
        const auto m = random_finite(6, 4, 909);
        const auto d1 = run_vanish_pipeline(m, kSchedule, kSolverTol, "weak", 1);
        const auto d2 = run_vanish_pipeline(m, kSchedule, kSolverTol, "weak", 1);
        const auto d4 = run_vanish_pipeline(m, kSchedule, kSolverTol, "weak", 4);
        c.require(d1 == d2, "repeated serial runs differ");
        c.require(d1 == d4, "parallel run differs from serial");
        c.require(diagnostics_to_json(d1).dump() == diagnostics_to_json(d2).dump(),
                  "serialized reports differ between runs");
        c.require(diagnostics_to_json(d1).dump() == diagnostics_to_json(d4).dump(),
                  "serialized reports differ between thread counts");
        const auto r1 = run_verification_suite(m, d1);
        const auto r2 = run_verification_suite(m, d4);
        c.require(report_to_json(r1).dump() == report_to_json(r2).dump(),
                  "verification reports differ");
    });

    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures;
}
