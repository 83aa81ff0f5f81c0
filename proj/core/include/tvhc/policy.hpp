#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tvhc/cost.hpp"
#include "tvhc/decision.hpp"
#include "tvhc/params.hpp"

namespace tvhc {

enum class PolicyKind { Fcfs, PPrio12, PPrio21, GenCmu, Aalto, LookAhead, OvertakeFixed };

/// A scheduling policy for the two-class queue. Every kind except Fcfs is
/// a non-decreasing index policy and reduces to an Overtake policy.
class PolicySpec {
public:
    static PolicySpec fcfs() { return PolicySpec(PolicyKind::Fcfs); }
    static PolicySpec pprio12() { return PolicySpec(PolicyKind::PPrio12); }
    static PolicySpec pprio21() { return PolicySpec(PolicyKind::PPrio21); }
    static PolicySpec gen_cmu() { return PolicySpec(PolicyKind::GenCmu); }
    static PolicySpec aalto() { return PolicySpec(PolicyKind::Aalto); }
    static PolicySpec lookahead() { return PolicySpec(PolicyKind::LookAhead); }
    /// alpha may be +inf. Throws std::invalid_argument for negative or NaN.
    static PolicySpec overtake(double alpha);

    PolicyKind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    bool is_index_policy() const noexcept { return kind_ != PolicyKind::Fcfs; }

    /// Stable textual id: fcfs, pprio12, pprio21, gen_cmu, aalto, lookahead,
    /// overtake.
    std::string_view name() const noexcept;

    /// name() for fixed kinds, "overtake(<alpha>)" otherwise.
    std::string label() const;

    /// Parses a bare name; "overtake" needs an explicit age so it is not
    /// accepted here.
    static PolicySpec from_name(std::string_view name);

    friend bool operator==(const PolicySpec&, const PolicySpec&) = default;

private:
    explicit PolicySpec(PolicyKind k, double alpha = 0.0) : kind_(k), alpha_(alpha) {}
    PolicyKind kind_;
    double alpha_;
};

/// The policies compared in the experiments, in reporting order.
std::vector<PolicySpec> standard_policies();

/// Class-1 priority index at age t. Strict priorities use +/-inf sentinels;
/// a fixed Overtake(alpha) is the step -inf / +inf at alpha.
/// Throws std::invalid_argument for Fcfs.
double index_class1(const PolicySpec& p, double t, const SystemParams& params, const HoldingCostFn& c1);

/// Class-2 index mu2 * c2.
double index_class2(const SystemParams& params, double c2);

/// Youngest age at which the class-1 index reaches the class-2 index.
/// Bisection to 1e-9 after geometric bracket expansion.
AlphaDecision overtake_age(const PolicySpec& p, const SystemParams& params, const HoldingCostFn& c1, double c2);

}  // namespace tvhc
