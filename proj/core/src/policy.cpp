#include "tvhc/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvhc/format.hpp"

namespace tvhc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracketCap = 1e6;
constexpr double kAgeTol = 1e-9;

}  // namespace

PolicySpec PolicySpec::overtake(double alpha) {
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("overtake age must be non-negative");
    }
    return PolicySpec(PolicyKind::OvertakeFixed, alpha);
}

std::string_view PolicySpec::name() const noexcept {
    switch (kind_) {
        case PolicyKind::Fcfs: return "fcfs";
        case PolicyKind::PPrio12: return "pprio12";
        case PolicyKind::PPrio21: return "pprio21";
        case PolicyKind::GenCmu: return "gen_cmu";
        case PolicyKind::Aalto: return "aalto";
        case PolicyKind::LookAhead: return "lookahead";
        case PolicyKind::OvertakeFixed: return "overtake";
    }
    return "?";
}

std::string PolicySpec::label() const {
    if (kind_ != PolicyKind::OvertakeFixed) {
        return std::string(name());
    }
    return "overtake(" + fmt_double(alpha_) + ")";
}

PolicySpec PolicySpec::from_name(std::string_view name) {
    if (name == "fcfs") return fcfs();
    if (name == "pprio12") return pprio12();
    if (name == "pprio21") return pprio21();
    if (name == "gen_cmu") return gen_cmu();
    if (name == "aalto") return aalto();
    if (name == "lookahead") return lookahead();
    throw std::invalid_argument("unknown policy name: " + std::string(name));
}

std::vector<PolicySpec> standard_policies() {
    return {PolicySpec::fcfs(),    PolicySpec::pprio12(), PolicySpec::pprio21(),
            PolicySpec::gen_cmu(), PolicySpec::aalto(),   PolicySpec::lookahead()};
}

double index_class1(const PolicySpec& p, double t, const SystemParams& params, const HoldingCostFn& c1) {
    if (!(t >= 0.0)) {
        throw std::domain_error("index_class1: age must be non-negative");
    }
    switch (p.kind()) {
        case PolicyKind::Fcfs:
            throw std::invalid_argument("FCFS is not an index policy");
        case PolicyKind::PPrio12:
            return kInf;
        case PolicyKind::PPrio21:
            return -kInf;
        case PolicyKind::OvertakeFixed:
            return t >= p.alpha() ? kInf : -kInf;
        case PolicyKind::GenCmu:
            return params.mu1 * eval(c1, t);
        case PolicyKind::Aalto:
            return params.mu1 * exp_shift_mean(c1, t, params.mu1);
        case PolicyKind::LookAhead:
            if (!(params.lookahead_rate() > 0.0)) {
                throw UnstableSystem("LookAhead index needs mu1 > lambda1");
            }
            return params.mu1 * exp_shift_mean(c1, t, params.lookahead_rate());
    }
    throw std::logic_error("unreachable policy kind");
}

double index_class2(const SystemParams& params, double c2) {
    if (!(c2 >= 0.0)) {
        throw std::domain_error("class-2 cost must be non-negative");
    }
    return params.mu2 * c2;
}

AlphaDecision overtake_age(const PolicySpec& p, const SystemParams& params, const HoldingCostFn& c1, double c2) {
    switch (p.kind()) {
        case PolicyKind::Fcfs:
            throw std::invalid_argument("FCFS has no overtake age");
        case PolicyKind::PPrio12:
            return AlphaDecision::zero();
        case PolicyKind::PPrio21:
            return AlphaDecision::infinite();
        case PolicyKind::OvertakeFixed:
            return AlphaDecision::finite(p.alpha());
        default:
            break;
    }

    const double target = index_class2(params, c2);
    const auto v1 = [&](double t) { return index_class1(p, t, params, c1); };

    if (v1(0.0) >= target) {
        return AlphaDecision::zero();
    }
    // Every index here tends to mu1 * c1(inf).
    if (params.mu1 * c1.limit() < target) {
        return AlphaDecision::infinite();
    }

    double lo = 0.0;
    double hi = 1.0;
    if (!c1.breakpoints().empty()) {
        hi = std::max(hi, c1.breakpoints().back());
    }
    while (v1(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > kBracketCap) {
            return AlphaDecision::infinite();
        }
    }
    while (hi - lo > kAgeTol) {
        const double mid = 0.5 * (lo + hi);
        if (v1(mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return AlphaDecision::finite(hi);
}

}  // namespace tvhc
