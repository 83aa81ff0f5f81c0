#include "tvhc/optimal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace tvhc {
namespace {

constexpr double kBracketCap = 1e6;

}  // namespace

AlphaDecision solve_alpha_star(const SystemParams& params, const HoldingCostFn& c1, double c2) {
    params.validate();
    if (!(c2 >= 0.0)) {
        throw std::domain_error("class-2 cost must be non-negative");
    }
    const double theta = params.lookahead_rate();
    const double target = c2 * params.mu2 / params.mu1;
    const auto gap = [&](double a) { return exp_shift_mean(c1, a, theta) - target; };

    if (gap(0.0) >= 0.0) {
        return AlphaDecision::zero();
    }
    if (c1.limit() < target) {
        return AlphaDecision::infinite();
    }

    double lo = 0.0;
    double hi = c1.breakpoints().empty() ? 1.0 : std::max(1.0, c1.breakpoints().back());
    double g_hi = gap(hi);
    while (g_hi < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kBracketCap) {
            return AlphaDecision::infinite();
        }
        g_hi = gap(hi);
    }
    if (g_hi == 0.0) {
        // The gap may be flat at zero past the root; shrink to the smallest root.
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) >= 0.0 ? hi : lo) = mid;
        }
        return AlphaDecision::finite(hi);
    }

    std::uintmax_t max_iter = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(48);
    const auto [a, b] = boost::math::tools::toms748_solve(gap, lo, hi, gap(lo), g_hi, tol, max_iter);
    return AlphaDecision::finite(0.5 * (a + b));
}

double alpha_star_closed_form(Family family, double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::domain_error("alpha_star_closed_form: rho must lie in [0, 1)");
    }
    switch (family) {
        case Family::Quadratic: {
            // E[(a + X)^2] = 90 with X ~ Exp(1 - 0.9 rho).
            const double inv_theta = 1.0 / (1.0 - 0.9 * rho);
            const double disc = 90.0 - inv_theta * inv_theta;
            if (disc < 0.0) {
                return 0.0;
            }
            return std::max(0.0, -inv_theta + std::sqrt(disc));
        }
        case Family::Deadline: {
            // d - ln(mu1 c1 / (mu2 c2)) / (mu1 - lambda1)
            const double alpha = 10.0 - std::log(30.0) / (3.0 - 2.25 * rho);
            return std::max(0.0, alpha);
        }
        case Family::Custom:
            break;
    }
    throw std::domain_error("no closed form for custom families");
}

double alpha_star_heavy_traffic_limit(Family family) {
    switch (family) {
        case Family::Quadratic: return 0.0;
        case Family::Deadline: return 10.0 - (4.0 / 3.0) * std::log(30.0);
        case Family::Custom: break;
    }
    throw std::domain_error("no closed form for custom families");
}

}  // namespace tvhc
