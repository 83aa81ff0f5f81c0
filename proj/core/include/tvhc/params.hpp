#pragma once

#include <stdexcept>

namespace tvhc {

class UnstableSystem : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Arrival and service rates of the two-class preemptive M/M/1 queue.
struct SystemParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double mu1 = 1.0;
    double mu2 = 1.0;

    double rho1() const noexcept { return lambda1 / mu1; }
    double rho2() const noexcept { return lambda2 / mu2; }
    double rho() const noexcept { return rho1() + rho2(); }

    /// Rate of the class-1-only M/M/1 response time, mu1 - lambda1.
    double lookahead_rate() const noexcept { return mu1 - lambda1; }

    /// Time-average work in system, identical for every work-conserving
    /// policy: (lambda1/mu1^2 + lambda2/mu2^2) / (1 - rho).
    double mean_work() const noexcept;

    /// Throws UnstableSystem unless all rates are finite, service rates are
    /// positive, arrival rates are non-negative and rho < 1 - 1e-12.
    void validate() const;
};

}  // namespace tvhc
