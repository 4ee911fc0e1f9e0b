// Command-line front door: models, schedules, solvers, verifiers, reports.
//
// Exit codes are a stable contract:
//   0 ok, 2 input/validation error, 3 solver non-convergence,
//   4 policy extraction failure, 5 verification (residual-check) failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vdmdp/catalog.hpp"
#include "vdmdp/discounted.hpp"
#include "vdmdp/io.hpp"
#include "vdmdp/model.hpp"
#include "vdmdp/schedule.hpp"
#include "vdmdp/sim.hpp"
#include "vdmdp/util.hpp"
#include "vdmdp/vanish.hpp"
#include "vdmdp/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitExtraction = 4;
constexpr int kExitVerification = 5;

vdmdp::MdpModel load_validated(const std::string& path) {
    auto loaded = vdmdp::load_model(path);
    if (!loaded.report.ok()) {
        std::cerr << path << ": model validation failed:\n";
        for (const auto& v : loaded.report.violations) std::cerr << "  - " << v << "\n";
        throw vdmdp::parse_error("invalid model");
    }
    return std::move(loaded.model);
}

void print_value_table(const vdmdp::RelativeValue& rv) {
    std::printf("alpha = %.17g\n", rv.alpha);
    std::printf("m_alpha = %.17g\n", rv.m);
    std::printf("(1-alpha)*m_alpha = %.17g\n", rv.one_minus_alpha_m);
    std::printf("state  v_alpha                    u_alpha\n");
    for (std::size_t x = 0; x < rv.v.values.size(); ++x)
        std::printf("%5zu  %-26.17g %-26.17g\n", x, rv.v.values[x], rv.u.values[x]);
}

int cmd_solve(const std::string& model_file, double alpha, double tol,
              const std::string& out) {
    const auto model = load_validated(model_file);
    const auto rv = vdmdp::relative_value(model, alpha, tol);
    // files land before stdout so a closed pipe cannot lose them
    if (!out.empty()) {
        vdmdp::json j;
        j["alpha"] = rv.alpha;
        j["m"] = rv.m;
        j["one_minus_alpha_m"] = rv.one_minus_alpha_m;
        j["v"] = rv.v.values;
        j["u"] = rv.u.values;
        vdmdp::save_json(j, out);
    }
    print_value_table(rv);
    return kExitOk;
}

int cmd_vanish(const std::string& model_file, const std::string& schedule_spec,
               std::string construction, double tol, const std::string& out,
               const std::string& policy_out, int threads) {
    const auto model = load_validated(model_file);
    const auto schedule = vdmdp::parse_schedule(schedule_spec);
    if (construction == "auto")
        construction = model.continuity_class == vdmdp::ContinuityClass::SetwiseStar
                           ? "pointwise"
                           : "weak";
    const auto diag = vdmdp::run_vanish_pipeline(model, schedule, tol, construction, threads);
    if (!out.empty()) vdmdp::save_json(vdmdp::diagnostics_to_json(diag), out);
    if (!policy_out.empty()) vdmdp::save_json(vdmdp::policy_to_json(diag.policy), policy_out);
    std::printf("schedule %s, %d discount factors, tail window %d\n", schedule_spec.c_str(),
                diag.schedule.size(), diag.tail_window);
    std::printf("w_lower_seq = %.17g\n", diag.w_lower_seq);
    std::printf("w_upper_seq = %.17g\n", diag.w_upper_seq);
    std::printf("w_star_estimate = %.17g (%s)\n", diag.w_star_estimate,
                diag.w_star_method.c_str());
    std::printf("u construction: %s\n", diag.u.meta.c_str());
    std::printf("state  u(x)                       policy action\n");
    for (int x = 0; x < model.num_states(); ++x)
        std::printf("%5d  %-26.17g %s\n", x, diag.u.values[x],
                    model.actions[diag.policy.action_of[x]].c_str());
    return kExitOk;
}

int cmd_verify(const std::string& model_file, const std::string& diagnostics_file,
               const std::string& checks, double tol, const std::string& out) {
    const auto model = load_validated(model_file);
    const auto diag = vdmdp::diagnostics_from_json(vdmdp::load_json(diagnostics_file));
    vdmdp::SuiteOptions opts;
    if (tol > 0.0) opts.residual_tol = tol;
    if (!checks.empty()) {
        std::stringstream ss(checks);
        std::string tok;
        while (std::getline(ss, tok, ',')) opts.only.push_back(tok);
    }
    const auto report = vdmdp::run_verification_suite(model, diag, opts);
    if (!out.empty()) vdmdp::save_json(vdmdp::report_to_json(report), out);
    std::fputs(vdmdp::report_to_table(report).c_str(), stdout);
    return report.gate_pass() ? kExitOk : kExitVerification;
}

int cmd_simulate(const std::string& model_file, const std::string& policy_file, int x0,
                 long horizon, int reps, std::uint64_t seed, const std::string& out,
                 const std::string& traj_out, bool tauberian,
                 const std::string& schedule_spec, int threads) {
    const auto model = load_validated(model_file);
    const auto policy = vdmdp::policy_from_json(vdmdp::load_json(policy_file));
    const int bad = vdmdp::first_infeasible_state(model, policy);
    if (bad != -1) {
        std::cerr << policy_file << ": action outside A(x) at state " << bad << "\n";
        return kExitInput;
    }
    const auto est =
        vdmdp::simulate_average_cost(model, policy, x0, horizon, reps, seed, threads);
    if (!out.empty()) vdmdp::save_json(vdmdp::estimate_to_json(est), out);
    std::printf("x0 = %d, horizon = %ld, replications = %d, seed = %llu\n", est.x0,
                est.horizon, est.replications, static_cast<unsigned long long>(est.seed));
    std::printf("mean cesaro average = %.17g\n", est.mean);
    std::printf("std error           = %.17g\n", est.std_error);
    std::printf("limsup proxy        = %.17g\n", est.limsup_proxy);
    if (!traj_out.empty()) {
        const auto traj = vdmdp::simulate_trajectory(model, policy, x0, horizon,
                                                     seed ^ vdmdp::mix64(0));
        std::ofstream f(traj_out);
        if (!f) {
            std::cerr << "cannot open " << traj_out << "\n";
            return kExitInput;
        }
        long step = 0;
        for (const auto& s : traj.steps) {
            char line[128];
            std::snprintf(line, sizeof(line), "%ld %d %d %.17g\n", step++, s.state, s.action,
                          s.cost);
            f << line;
        }
    }
    if (tauberian) {
        const auto schedule = vdmdp::parse_schedule(schedule_spec);
        const auto res = vdmdp::tauberian_check(model, policy, x0, schedule, horizon, reps,
                                                seed, -1, threads);
        std::printf("tauberian bound = %.17g, verdict %s\n", res.rhs_bound,
                    res.pass ? "pass" : "FAIL");
        for (std::size_t i = 0; i < res.indices.size(); ++i)
            std::printf("  n=%d  (1-alpha_n)*v^pi = %.17g\n", res.indices[i], res.lhs[i]);
    }
    return kExitOk;
}

int cmd_catalog(const std::string& name, int grid_size, int n_pairs, int states, int actions,
                std::uint64_t seed, double sparsity, const std::string& out) {
    vdmdp::MdpModel model;
    if (name == "indicator")
        model = vdmdp::example_indicator(grid_size);
    else if (name == "dirichlet")
        model = vdmdp::example_dirichlet(n_pairs);
    else if (name == "random")
        model = vdmdp::random_finite(states, actions, seed, sparsity);
    else {
        std::cerr << "unknown catalog model '" << name
                  << "' (expected indicator, dirichlet or random)\n";
        return kExitInput;
    }
    vdmdp::save_model(model, out);
    std::printf("wrote %s (%d states, %d actions)\n", out.c_str(), model.num_states(),
                model.num_actions());
    return kExitOk;
}

int cmd_report(const std::string& in) {
    const auto j = vdmdp::load_json(in);
    if (j.contains("checks")) {
        vdmdp::VerificationReport rep;
        for (const auto& jc : j["checks"]) {
            vdmdp::CheckResult c;
            c.name = jc.at("name").get<std::string>();
            const std::string kind = jc.at("kind").get<std::string>();
            c.kind = kind == "exact"      ? vdmdp::CheckKind::Exact
                     : kind == "residual" ? vdmdp::CheckKind::Residual
                                          : vdmdp::CheckKind::Evidence;
            c.residual = vdmdp::detail::null_to_nan(jc.at("residual"));
            c.tol = vdmdp::detail::null_to_nan(jc.at("tol"));
            c.pass = jc.at("verdict").get<std::string>() == "pass";
            c.notes = jc.at("notes").get<std::string>();
            rep.checks.push_back(std::move(c));
        }
        std::fputs(vdmdp::report_to_table(rep).c_str(), stdout);
        return kExitOk;
    }
    if (j.contains("trace")) {
        const auto d = vdmdp::diagnostics_from_json(j);
        std::printf("n      alpha                      (1-alpha)*m_alpha\n");
        for (int n = 0; n < d.schedule.size(); ++n)
            std::printf("%5d  %-26.17g %-26.17g\n", n, d.trace[n].alpha,
                        d.trace[n].one_minus_alpha_m);
        std::printf("w_lower_seq = %.17g\nw_upper_seq = %.17g\nw_star_estimate = %.17g\n",
                    d.w_lower_seq, d.w_upper_seq, d.w_star_estimate);
        return kExitOk;
    }
    if (j.contains("cesaro")) {
        std::printf("mean = %.17g\nstd_error = %.17g\nlimsup_proxy = %.17g\n",
                    j.at("mean").get<double>(), j.at("std_error").get<double>(),
                    j.at("limsup_proxy").get<double>());
        return kExitOk;
    }
    std::cerr << in << ": unrecognized report document\n";
    return kExitInput;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"average-cost MDP toolkit: discounted solves along a schedule of discount "
                 "factors rising to 1, limit relative values, policy extraction, and "
                 "numerical verification of the optimality inequalities and equations"};
    app.require_subcommand(1);
    const int threads = vdmdp::env_thread_count();

    std::string model_file, out, policy_out, policy_file, diagnostics_file, traj_out, in_file;
    std::string schedule_spec = "geometric:0.5:30";
    std::string construction = "auto";
    std::string checks;
    double alpha = 0.9, tol = 1e-10, verify_tol = -1.0, sparsity = 0.5;
    int x0 = 0, reps = 16, grid_size = 101, n_pairs = 3, states = 4, actions = 3;
    long horizon = 100000;
    std::uint64_t seed = 1;
    bool tauberian = false;
    std::string catalog_name;

    auto* solve = app.add_subcommand("solve", "solve one discounted problem");
    solve->add_option("--model", model_file, "model file")->required();
    solve->add_option("--alpha", alpha, "discount factor in [0,1)")->required();
    solve->add_option("--tol", tol, "solver tolerance");
    solve->add_option("--out", out, "write v/m/u as JSON");

    auto* vanish = app.add_subcommand("vanish", "run the vanishing-discount pipeline");
    vanish->add_option("--model", model_file, "model file")->required();
    vanish->add_option("--schedule", schedule_spec,
                       "geometric:<gamma>:<n_max> | harmonic:<n_max> | list:a0,a1,...");
    vanish->add_option("--construction", construction, "pointwise | weak | auto");
    vanish->add_option("--tol", tol, "solver tolerance");
    vanish->add_option("--out", out, "write diagnostics JSON");
    vanish->add_option("--policy-out", policy_out, "write extracted policy JSON");

    auto* verify = app.add_subcommand("verify", "check inequalities/equations/assumptions");
    verify->add_option("--model", model_file, "model file")->required();
    verify->add_option("--diagnostics", diagnostics_file, "diagnostics JSON from 'vanish'")
        ->required();
    verify->add_option("--checks", checks, "comma-separated name prefixes (default: all)");
    verify->add_option("--tol", verify_tol, "residual tolerance override");
    verify->add_option("--out", out, "write report JSON");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo average-cost estimate");
    simulate->add_option("--model", model_file, "model file")->required();
    simulate->add_option("--policy", policy_file, "policy JSON")->required();
    simulate->add_option("--x0", x0, "initial state");
    simulate->add_option("--horizon", horizon, "steps per replication");
    simulate->add_option("--reps", reps, "replications");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--out", out, "write estimate JSON");
    simulate->add_option("--traj-out", traj_out, "dump one trajectory (step state action cost)");
    simulate->add_flag("--tauberian", tauberian, "also run the Abel-vs-Cesaro check");
    simulate->add_option("--schedule", schedule_spec, "schedule for --tauberian");

    auto* catalog = app.add_subcommand("catalog", "write a catalog model file");
    catalog->add_option("name", catalog_name, "indicator | dirichlet | random")->required();
    catalog->add_option("--grid-size", grid_size, "indicator: number of grid points");
    catalog->add_option("--n-pairs", n_pairs, "dirichlet: label pairs");
    catalog->add_option("--states", states, "random: state count");
    catalog->add_option("--actions", actions, "random: action count");
    catalog->add_option("--seed", seed, "random: seed");
    catalog->add_option("--sparsity", sparsity, "random: kernel concentration in [0,1]");
    catalog->add_option("--out", out, "output model file")->required();

    auto* report = app.add_subcommand("report", "render a JSON report as a table");
    report->add_option("--in", in_file, "report/diagnostics/estimate JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (solve->parsed()) return cmd_solve(model_file, alpha, tol, out);
        if (vanish->parsed())
            return cmd_vanish(model_file, schedule_spec, construction, tol, out, policy_out,
                              threads);
        if (verify->parsed())
            return cmd_verify(model_file, diagnostics_file, checks, verify_tol, out);
        if (simulate->parsed())
            return cmd_simulate(model_file, policy_file, x0, horizon, reps, seed, out,
                                traj_out, tauberian, schedule_spec, threads);
        if (catalog->parsed())
            return cmd_catalog(catalog_name, grid_size, n_pairs, states, actions, seed,
                               sparsity, out);
        if (report->parsed()) return cmd_report(in_file);
    } catch (const vdmdp::solver_error& e) {
        std::cerr << "solver error: " << e.what() << " (last residual " << e.last_residual
                  << " after " << e.iterations << " iterations)\n";
        return kExitSolver;
    } catch (const vdmdp::extraction_error& e) {
        std::cerr << "extraction error: " << e.what() << "\n";
        return kExitExtraction;
    } catch (const vdmdp::parse_error& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
