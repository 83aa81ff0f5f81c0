#pragma once

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tvhc/cost.hpp"
#include "tvhc/decision.hpp"
#include "tvhc/policy.hpp"
#include "tvhc/simulator.hpp"
#include "tvhc/verify.hpp"

namespace tvhc {

/// Malformed or invalid JSON input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// True for integral JSON numbers >= 0, whether stored signed or unsigned.
bool is_non_negative_integer(const nlohmann::json& v);

// Cost functions:
//   {"kind": "constant", "c": 5}
//   {"kind": "polynomial", "coeffs": [0, 0, 1]}
//   {"kind": "deadline", "c_after": 10, "d": 10}
//   {"kind": "piecewise_linear", "knots": [[0, 0], [5, 1], [10, 4]]}
nlohmann::json cost_to_json(const HoldingCostFn& f);
HoldingCostFn cost_from_json(const nlohmann::json& j);

// Policies: {"policy": "lookahead"} or {"policy": "overtake", "alpha": 3.5}.
// A bare string names a policy without parameters. alpha may be the string
// "inf".
nlohmann::json policy_to_json(const PolicySpec& p);
PolicySpec policy_from_json(const nlohmann::json& j);

// {"case": "zero"|"finite"|"infinite", "alpha": number} (alpha omitted for
// infinite).
nlohmann::json decision_to_json(const AlphaDecision& d);
AlphaDecision decision_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& r);

// {"horizon_events": n, "warmup_events": n, "seed": n, "record_tails": bool,
//  "record_jobs": bool};
// missing fields keep `defaults`. When only horizon_events is given the
// warmup defaults to 10% of it.
SimOptions sim_options_from_json(const nlohmann::json& j, SimOptions defaults = {});
nlohmann::json sim_options_to_json(const SimOptions& o);

}  // namespace tvhc
