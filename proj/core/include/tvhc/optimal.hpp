#pragma once

#include "tvhc/cost.hpp"
#include "tvhc/decision.hpp"
#include "tvhc/family.hpp"
#include "tvhc/params.hpp"

namespace tvhc {

/// Optimal overtake age. Zero when E[c1(X)] >= c2 mu2 / mu1, Infinite when
/// c1(inf) < c2 mu2 / mu1, otherwise the root of
/// E[c1(alpha + X)] = c2 mu2 / mu1 with X ~ Exp(mu1 - lambda1).
AlphaDecision solve_alpha_star(const SystemParams& params, const HoldingCostFn& c1, double c2);

/// Closed-form optimal overtake age for the published families, clamped
/// at 0. Throws std::domain_error unless 0 <= rho < 1, or for Custom.
double alpha_star_closed_form(Family family, double rho);

/// Heavy-traffic limit rho -> 1 of the closed form.
double alpha_star_heavy_traffic_limit(Family family);

}  // namespace tvhc
