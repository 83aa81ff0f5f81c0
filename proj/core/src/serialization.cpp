#include "tvhc/serialization.hpp"

#include <cmath>
#include <limits>

namespace tvhc {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(std::string("expected numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

double age_value(const json& v) {
    if (v.is_string() && v.get<std::string>() == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (!v.is_number()) {
        throw ConfigError("overtake age must be a number or \"inf\"");
    }
    return v.get<double>();
}

}  // namespace

json cost_to_json(const HoldingCostFn& f) {
    return std::visit(overloaded{
                          [](const ConstantCost& c) { return json{{"kind", "constant"}, {"c", c.c}}; },
                          [](const PolynomialCost& p) { return json{{"kind", "polynomial"}, {"coeffs", p.coeffs}}; },
                          [](const DeadlineCost& d) {
                              return json{{"kind", "deadline"}, {"c_after", d.c_after}, {"d", d.d}};
                          },
                          [](const PiecewiseLinearCost& p) {
                              json knots = json::array();
                              for (const Knot& k : p.knots) {
                                  knots.push_back({k.t, k.rate});
                              }
                              return json{{"kind", "piecewise_linear"}, {"knots", knots}};
                          },
                      },
                      f.variant());
}

HoldingCostFn cost_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("cost function must be an object with a string 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "constant") {
            return HoldingCostFn::constant(number(j, "c"));
        }
        if (kind == "polynomial") {
            if (!j.contains("coeffs") || !j.at("coeffs").is_array()) {
                throw ConfigError("polynomial cost needs a 'coeffs' array");
            }
            return HoldingCostFn::polynomial(j.at("coeffs").get<std::vector<double>>());
        }
        if (kind == "deadline") {
            return HoldingCostFn::deadline(number(j, "c_after"), number(j, "d"));
        }
        if (kind == "piecewise_linear") {
            if (!j.contains("knots") || !j.at("knots").is_array()) {
                throw ConfigError("piecewise linear cost needs a 'knots' array");
            }
            std::vector<Knot> knots;
            for (const json& k : j.at("knots")) {
                if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
                    throw ConfigError("each knot must be a [time, rate] pair");
                }
                knots.push_back({k[0].get<double>(), k[1].get<double>()});
            }
            return HoldingCostFn::piecewise_linear(std::move(knots));
        }
    } catch (const InvalidCost& e) {
        throw ConfigError(std::string("invalid cost function: ") + e.what());
    }
    throw ConfigError("unknown cost kind '" + kind + "'");
}

json policy_to_json(const PolicySpec& p) {
    json j{{"policy", std::string(p.name())}};
    if (p.kind() == PolicyKind::OvertakeFixed) {
        if (std::isinf(p.alpha())) {
            j["alpha"] = "inf";
        } else {
            j["alpha"] = p.alpha();
        }
    }
    return j;
}

PolicySpec policy_from_json(const json& j) {
    std::string name;
    if (j.is_string()) {
        name = j.get<std::string>();
    } else if (j.is_object() && j.contains("policy") && j.at("policy").is_string()) {
        name = j.at("policy").get<std::string>();
    } else {
        throw ConfigError("policy must be a name or an object with a 'policy' field");
    }
    try {
        if (name == "overtake") {
            if (!j.is_object() || !j.contains("alpha")) {
                throw ConfigError("overtake policy needs an 'alpha'");
            }
            return PolicySpec::overtake(age_value(j.at("alpha")));
        }
        return PolicySpec::from_name(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

json decision_to_json(const AlphaDecision& d) {
    json j{{"case", d.case_name()}};
    if (!d.is_infinite()) {
        j["alpha"] = d.age();
    }
    return j;
}

AlphaDecision decision_from_json(const json& j) {
    if (!j.is_object() || !j.contains("case") || !j.at("case").is_string()) {
        throw ConfigError("decision must be an object with a string 'case'");
    }
    const std::string c = j.at("case").get<std::string>();
    if (c == "zero") return AlphaDecision::zero();
    if (c == "infinite") return AlphaDecision::infinite();
    if (c == "finite") return AlphaDecision::finite(number(j, "alpha"));
    throw ConfigError("unknown decision case '" + c + "'");
}

json report_to_json(const VerificationReport& r) {
    const auto num = [](double x) -> json {
        if (std::isfinite(x)) {
            return x;
        }
        return std::isnan(x) ? json("nan") : json(x > 0 ? "inf" : "-inf");
    };
    return json{{"check", r.check_name},
                {"statistic", num(r.statistic)},
                {"threshold", num(r.threshold)},
                {"passed", r.passed},
                {"detail", r.detail}};
}

bool is_non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

SimOptions sim_options_from_json(const json& j, SimOptions o) {
    if (!j.is_object()) {
        throw ConfigError("sim options must be an object");
    }
    const auto count = [&](const char* key, std::uint64_t& out) {
        if (j.contains(key)) {
            if (!is_non_negative_integer(j.at(key))) {
                throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
            }
            out = j.at(key).get<std::uint64_t>();
        }
    };
    count("horizon_events", o.horizon_events);
    if (j.contains("horizon_events") && !j.contains("warmup_events")) {
        o.warmup_events = o.horizon_events / 10;
    }
    count("warmup_events", o.warmup_events);
    count("seed", o.seed);
    for (const char* key : {"record_tails", "record_jobs"}) {
        if (j.contains(key)) {
            if (!j.at(key).is_boolean()) {
                throw ConfigError(std::string("'") + key + "' must be a boolean");
            }
            (std::string_view(key) == "record_tails" ? o.record_tails : o.record_jobs) = j.at(key).get<bool>();
        }
    }
    try {
        o.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return o;
}

json sim_options_to_json(const SimOptions& o) {
    return json{{"horizon_events", o.horizon_events},
                {"warmup_events", o.warmup_events},
                {"seed", o.seed},
                {"record_tails", o.record_tails},
                {"record_jobs", o.record_jobs}};
}

}  // namespace tvhc
