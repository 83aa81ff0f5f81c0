#pragma once

#include <string_view>

#include "tvhc/cost.hpp"
#include "tvhc/params.hpp"

namespace tvhc {

/// The two published experiment settings plus user-defined ones.
enum class Family { Quadratic, Deadline, Custom };

std::string_view family_name(Family f) noexcept;
Family family_from_name(std::string_view name);

/// Rates and costs of an experiment family. Arrival rates are derived from a
/// load rho and the class-1 share of arrivals.
struct FamilySetup {
    Family family = Family::Custom;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double class1_fraction = 0.5;
    HoldingCostFn c1 = HoldingCostFn::constant(0.0);
    double c2 = 0.0;

    /// lambda = rho / (f/mu1 + (1-f)/mu2), lambda1 = f lambda, lambda2 = (1-f) lambda.
    SystemParams params_at(double rho) const;
    NetCost net_cost() const { return NetCost{c1, c2, mu1, mu2}; }
};

/// mu1 = 1, mu2 = 3, lambda1 = 0.75 lambda, c1(t) = t^2, c2 = 30.
FamilySetup quadratic_family();

/// mu1 = 3, mu2 = 1, lambda1 = 0.9 lambda, c1 = 10 * 1{t >= 10}, c2 = 1.
FamilySetup deadline_family();

FamilySetup family_setup(Family f);

}  // namespace tvhc
