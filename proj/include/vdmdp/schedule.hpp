#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vdmdp {

/// Truncated discount schedule alpha_0 < alpha_1 < ... < alpha_{n_max} < 1. The
/// untruncated geometric/harmonic families have supremum 1; explicit lists are
/// taken at face value.
struct DiscountSchedule {
    std::string kind;          // "geometric", "harmonic" or "list"
    double gamma = 0.5;        // geometric only
    int n_max = 0;             // index of the last value
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }

    bool operator==(const DiscountSchedule&) const = default;
};

inline void validate_schedule(const DiscountSchedule& s) {
    if (s.values.empty()) throw std::invalid_argument("schedule: empty");
    if (s.n_max != static_cast<int>(s.values.size()) - 1)
        throw std::invalid_argument("schedule: n_max does not match value count");
    double prev = -1.0;
    for (double a : s.values) {
        if (!(a >= 0.0 && a < 1.0))
            throw std::invalid_argument("schedule: values must lie in [0,1)");
        if (!(a > prev)) throw std::invalid_argument("schedule: values must be strictly increasing");
        prev = a;
    }
}

/// alpha_n = 1 - gamma^{n+1}. The default geometric:0.5:30 reaches 1 - 5e-10
/// while keeping per-alpha solve costs bounded.
inline DiscountSchedule geometric_schedule(double gamma, int n_max) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("geometric schedule: gamma must be in (0,1)");
    if (n_max < 0) throw std::invalid_argument("geometric schedule: n_max must be >= 0");
    DiscountSchedule s;
    s.kind = "geometric";
    s.gamma = gamma;
    s.n_max = n_max;
    s.values.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) s.values.push_back(1.0 - std::pow(gamma, n + 1));
    validate_schedule(s);
    return s;
}

/// alpha_n = 1 - 1/(n+2).
inline DiscountSchedule harmonic_schedule(int n_max) {
    if (n_max < 0) throw std::invalid_argument("harmonic schedule: n_max must be >= 0");
    DiscountSchedule s;
    s.kind = "harmonic";
    s.n_max = n_max;
    s.values.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) s.values.push_back(1.0 - 1.0 / (n + 2));
    validate_schedule(s);
    return s;
}

inline DiscountSchedule explicit_schedule(std::vector<double> values) {
    DiscountSchedule s;
    s.kind = "list";
    s.n_max = static_cast<int>(values.size()) - 1;
    s.values = std::move(values);
    validate_schedule(s);
    return s;
}

/// Number of trailing schedule indices used when estimating liminf/limsup
/// quantities: the last ceil(n_max / 3) of them.
inline int default_tail_window(int n_max) {
    int w = (n_max + 2) / 3;
    if (w < 1) w = 1;
    if (w > n_max + 1) w = n_max + 1;
    return w;
}

/// Parses "geometric:<gamma>:<n_max>", "harmonic:<n_max>" or "list:a0,a1,...".
inline DiscountSchedule parse_schedule(const std::string& spec) {
    const auto fail = [&] { throw std::invalid_argument("bad schedule spec: " + spec); };
    const auto colon = spec.find(':');
    if (colon == std::string::npos) fail();
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    try {
        if (kind == "geometric") {
            const auto colon2 = rest.find(':');
            if (colon2 == std::string::npos) fail();
            return geometric_schedule(std::stod(rest.substr(0, colon2)),
                                      std::stoi(rest.substr(colon2 + 1)));
        }
        if (kind == "harmonic") return harmonic_schedule(std::stoi(rest));
        if (kind == "list") {
            std::vector<double> vals;
            std::stringstream ss(rest);
            std::string tok;
            while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
            return explicit_schedule(std::move(vals));
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        fail();
    }
    fail();
    return {};
}

} // namespace vdmdp
