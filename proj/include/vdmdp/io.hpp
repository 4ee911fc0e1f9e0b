#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "vdmdp/model.hpp"
#include "vdmdp/sim.hpp"
#include "vdmdp/vanish.hpp"
#include "vdmdp/verify.hpp"

namespace vdmdp {

using nlohmann::json;

class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline json number_or_inf(double v) {
    if (v == kInf) return json("inf");
    return json(v);
}

inline double parse_cost_entry(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string() && j.get<std::string>() == "inf") return kInf;
    throw parse_error("cost entry at " + where + " must be a number or \"inf\"");
}

inline json nan_to_null(double v) {
    if (std::isnan(v)) return json(nullptr);
    return json(v);
}

inline double null_to_nan(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Model file format
// ---------------------------------------------------------------------------

inline json model_to_json(const MdpModel& m) {
    json j;
    j["states"] = json::array();
    for (const auto& s : m.states) {
        json js;
        js["id"] = s.id;
        if (!s.coord.empty()) js["coord"] = s.coord;
        if (!s.label.empty()) js["label"] = s.label;
        j["states"].push_back(std::move(js));
    }
    if (m.has_metric_matrix())
        j["metric"] = m.metric_matrix;
    else
        j["metric"] = "euclidean-on-coord";
    j["actions"] = m.actions;
    j["cost"] = json::array();
    for (const auto& row : m.cost) {
        json jr = json::array();
        for (double c : row) jr.push_back(detail::number_or_inf(c));
        j["cost"].push_back(std::move(jr));
    }
    json kernel = json::object();
    for (int x = 0; x < m.num_states(); ++x)
        for (int a = 0; a < m.num_actions(); ++a) {
            if (!is_finite(m.cost[x][a])) continue;
            json entries = json::array();
            for (const auto& e : m.row(x, a))
                entries.push_back({{"state", e.state}, {"prob", e.prob}});
            kernel[std::to_string(x) + "," + std::to_string(a)] = std::move(entries);
        }
    j["kernel"] = std::move(kernel);
    j["continuity_class"] = to_string(m.continuity_class);
    return j;
}

struct LoadedModel {
    MdpModel model;
    ValidationReport report; // includes pre-normalization row deviations
};

/// Parses the model document. Kernel rows are normalized when they deviate from
/// 1 by more than double-resolution noise (1e-15); every pre-normalization
/// deviation is recorded. The returned report also carries the full invariant
/// validation of the normalized model.
inline LoadedModel model_from_json(const json& j) {
    LoadedModel out;
    MdpModel& m = out.model;
    try {
        for (const auto& js : j.at("states")) {
            StateRecord s;
            s.id = js.at("id").get<int>();
            if (js.contains("coord")) s.coord = js["coord"].get<std::vector<double>>();
            if (js.contains("label")) s.label = js["label"].get<std::string>();
            m.states.push_back(std::move(s));
        }
        const auto& metric = j.at("metric");
        if (metric.is_string()) {
            if (metric.get<std::string>() != "euclidean-on-coord")
                throw parse_error("metric must be a matrix or \"euclidean-on-coord\"");
        } else {
            m.metric_matrix = metric.get<Matrix>();
        }
        m.actions = j.at("actions").get<std::vector<std::string>>();
        int x = 0;
        for (const auto& jr : j.at("cost")) {
            std::vector<double> row;
            int a = 0;
            for (const auto& je : jr) {
                row.push_back(detail::parse_cost_entry(
                    je, "(" + std::to_string(x) + "," + std::to_string(a) + ")"));
                ++a;
            }
            m.cost.push_back(std::move(row));
            ++x;
        }
        const std::string cc = j.value("continuity_class", "none");
        if (cc == "W*")
            m.continuity_class = ContinuityClass::WeakStar;
        else if (cc == "S*")
            m.continuity_class = ContinuityClass::SetwiseStar;
        else if (cc == "none")
            m.continuity_class = ContinuityClass::None;
        else
            throw parse_error("continuity_class must be one of W*, S*, none");

        m.kernel.assign(static_cast<std::size_t>(m.num_states()) * m.num_actions(), {});
        const auto& kernel = j.at("kernel");
        for (auto it = kernel.begin(); it != kernel.end(); ++it) {
            const std::string key = it.key();
            const auto comma = key.find(',');
            if (comma == std::string::npos)
                throw parse_error("kernel key '" + key + "' is not of the form \"x,a\"");
            const int kx = std::stoi(key.substr(0, comma));
            const int ka = std::stoi(key.substr(comma + 1));
            if (kx < 0 || kx >= m.num_states() || ka < 0 || ka >= m.num_actions())
                throw parse_error("kernel key '" + key + "' out of range");
            KernelRow row;
            for (const auto& je : *it)
                row.push_back({je.at("state").get<int>(), je.at("prob").get<double>()});
            double sum = 0.0;
            for (const auto& e : row) sum += e.prob;
            const double deviation = std::fabs(sum - 1.0);
            out.report.row_deviations.push_back(deviation);
            if (deviation > 1e-15 && sum > 0.0)
                for (auto& e : row) e.prob /= sum;
            m.row(kx, ka) = std::move(row);
        }
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed model document: ") + e.what());
    }
    auto validation = validate_model(m);
    out.report.violations = std::move(validation.violations);
    return out;
}

inline void save_json(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw parse_error("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
}

inline json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
}

inline void save_model(const MdpModel& m, const std::string& path) {
    save_json(model_to_json(m), path);
}

inline LoadedModel load_model(const std::string& path) {
    return model_from_json(load_json(path));
}

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

inline json policy_to_json(const Policy& p) { return json{{"action_of", p.action_of}}; }

inline Policy policy_from_json(const json& j) {
    try {
        Policy p;
        p.action_of = j.at("action_of").get<std::vector<int>>();
        return p;
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed policy document: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Diagnostics bundle
// ---------------------------------------------------------------------------

inline json schedule_to_json(const DiscountSchedule& s) {
    json j;
    j["kind"] = s.kind;
    if (s.kind == "geometric") j["gamma"] = s.gamma;
    j["n_max"] = s.n_max;
    j["values"] = s.values;
    return j;
}

inline DiscountSchedule schedule_from_json(const json& j) {
    try {
        DiscountSchedule s;
        s.kind = j.at("kind").get<std::string>();
        s.gamma = j.value("gamma", 0.5);
        s.n_max = j.at("n_max").get<int>();
        s.values = j.at("values").get<std::vector<double>>();
        validate_schedule(s);
        return s;
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed schedule: ") + e.what());
    }
}

inline json diagnostics_to_json(const VanishDiagnostics& d) {
    json j;
    j["schedule"] = schedule_to_json(d.schedule);
    j["solver_tol"] = d.solver_tol;
    j["tail_window"] = d.tail_window;
    j["trace"] = json::array();
    for (const auto& t : d.trace)
        j["trace"].push_back({{"alpha", t.alpha},
                              {"m", t.m},
                              {"one_minus_alpha_m", t.one_minus_alpha_m},
                              {"u", t.u}});
    j["w_lower_seq"] = d.w_lower_seq;
    j["w_upper_seq"] = d.w_upper_seq;
    j["w_lower"] = detail::nan_to_null(d.w_lower);
    j["w_upper"] = detail::nan_to_null(d.w_upper);
    j["u"] = {{"values", d.u.values}, {"meta", d.u.meta}};
    j["U_m"] = d.U_m;
    j["u_lower_m"] = d.u_lower_m;
    j["a_star"] = d.a_star;
    j["policy"] = d.policy.action_of;
    j["w_star_estimate"] = detail::nan_to_null(d.w_star_estimate);
    j["w_star_method"] = d.w_star_method;
    return j;
}

inline VanishDiagnostics diagnostics_from_json(const json& j) {
    try {
        VanishDiagnostics d;
        d.schedule = schedule_from_json(j.at("schedule"));
        d.solver_tol = j.at("solver_tol").get<double>();
        d.tail_window = j.at("tail_window").get<int>();
        for (const auto& jt : j.at("trace")) {
            TracePoint t;
            t.alpha = jt.at("alpha").get<double>();
            t.m = jt.at("m").get<double>();
            t.one_minus_alpha_m = jt.at("one_minus_alpha_m").get<double>();
            t.u = jt.at("u").get<std::vector<double>>();
            d.trace.push_back(std::move(t));
        }
        d.w_lower_seq = j.at("w_lower_seq").get<double>();
        d.w_upper_seq = j.at("w_upper_seq").get<double>();
        d.w_lower = detail::null_to_nan(j.at("w_lower"));
        d.w_upper = detail::null_to_nan(j.at("w_upper"));
        d.u.values = j.at("u").at("values").get<std::vector<double>>();
        d.u.meta = j.at("u").at("meta").get<std::string>();
        d.U_m = j.at("U_m").get<std::vector<std::vector<double>>>();
        d.u_lower_m = j.at("u_lower_m").get<std::vector<std::vector<double>>>();
        d.a_star = j.at("a_star").get<std::vector<std::vector<int>>>();
        d.policy.action_of = j.at("policy").get<std::vector<int>>();
        d.w_star_estimate = detail::null_to_nan(j.at("w_star_estimate"));
        d.w_star_method = j.at("w_star_method").get<std::string>();
        return d;
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed diagnostics document: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Verification reports and simulation estimates
// ---------------------------------------------------------------------------

inline json report_to_json(const VerificationReport& r) {
    json j;
    j["checks"] = json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name},
                               {"kind", to_string(c.kind)},
                               {"residual", detail::nan_to_null(c.residual)},
                               {"tol", detail::nan_to_null(c.tol)},
                               {"verdict", c.pass ? "pass" : "fail"},
                               {"notes", c.notes}});
    j["all_pass"] = r.all_pass();
    j["gate_pass"] = r.gate_pass();
    return j;
}

inline std::string report_to_table(const VerificationReport& r) {
    std::ostringstream os;
    os << "verdict  kind      residual                   tol                        name\n";
    for (const auto& c : r.checks) {
        char line[512];
        std::snprintf(line, sizeof(line), "%-8s %-9s %-26s %-26s %s\n",
                      c.pass ? "pass" : "FAIL", to_string(c.kind),
                      std::isnan(c.residual) ? "n/a" : fmt_g17(c.residual).c_str(),
                      std::isnan(c.tol) ? "n/a" : fmt_g17(c.tol).c_str(), c.name.c_str());
        os << line;
        if (!c.notes.empty()) os << "         | " << c.notes << "\n";
    }
    return os.str();
}

inline json estimate_to_json(const AverageCostEstimate& e) {
    json j;
    j["x0"] = e.x0;
    j["horizon"] = e.horizon;
    j["replications"] = e.replications;
    j["seed"] = e.seed;
    j["cesaro"] = e.cesaro;
    j["tail_max"] = e.tail_max;
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["limsup_proxy"] = e.limsup_proxy;
    return j;
}

} // namespace vdmdp
