#include "tvhc/family.hpp"

#include <stdexcept>
#include <string>

namespace tvhc {
namespace {

constexpr std::string_view kNames[] = {"quadratic", "deadline", "custom"};

}  // namespace

std::string_view family_name(Family f) noexcept { return kNames[static_cast<int>(f)]; }

Family family_from_name(std::string_view name) {
    if (name == "quadratic") return Family::Quadratic;
    if (name == "deadline") return Family::Deadline;
    if (name == "custom") return Family::Custom;
    throw std::invalid_argument("unknown family: " + std::string(name));
}

SystemParams FamilySetup::params_at(double rho) const {
    const double f = class1_fraction;
    const double lambda = rho / (f / mu1 + (1.0 - f) / mu2);
    return SystemParams{f * lambda, (1.0 - f) * lambda, mu1, mu2};
}

FamilySetup quadratic_family() {
    return FamilySetup{Family::Quadratic, 1.0, 3.0, 0.75, HoldingCostFn::polynomial({0.0, 0.0, 1.0}), 30.0};
}

FamilySetup deadline_family() {
    return FamilySetup{Family::Deadline, 3.0, 1.0, 0.9, HoldingCostFn::deadline(10.0, 10.0), 1.0};
}

FamilySetup family_setup(Family f) {
    switch (f) {
        case Family::Quadratic: return quadratic_family();
        case Family::Deadline: return deadline_family();
        case Family::Custom: break;
    }
    throw std::invalid_argument("custom family has no built-in setup");
}

}  // namespace tvhc
