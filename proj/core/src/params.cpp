#include "tvhc/params.hpp"

#include <cmath>
#include <sstream>

namespace tvhc {
namespace {

// Loads this close to 1 are treated as saturated; rates derived from
// rho = 1 land on either side of 1 after rounding.
constexpr double kSaturation = 1e-12;

}  // namespace

double SystemParams::mean_work() const noexcept {
    return (lambda1 / (mu1 * mu1) + lambda2 / (mu2 * mu2)) / (1.0 - rho());
}

void SystemParams::validate() const {
    const bool finite = std::isfinite(lambda1) && std::isfinite(lambda2) && std::isfinite(mu1) &&
                        std::isfinite(mu2);
    if (!finite || !(mu1 > 0.0) || !(mu2 > 0.0) || lambda1 < 0.0 || lambda2 < 0.0) {
        throw UnstableSystem("system rates must be finite with mu1, mu2 > 0 and lambda1, lambda2 >= 0");
    }
    if (!(rho() < 1.0 - kSaturation)) {
        std::ostringstream os;
        os << "unstable system: rho = " << rho() << " >= 1";
        throw UnstableSystem(os.str());
    }
}

}  // namespace tvhc
