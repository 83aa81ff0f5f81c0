#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvhc/cost.hpp"
#include "tvhc/params.hpp"
#include "tvhc/simulator.hpp"

namespace tvhc {

struct VerificationReport {
    std::string check_name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string detail;
};

/// passed is set to statistic <= threshold (false for NaN).
VerificationReport make_report(std::string name, double statistic, double threshold, std::string detail = {});

class InsufficientSample : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |rho1 mean(T1) + rho2 mean(T2) - W| / W.
VerificationReport check_conservation(const SimResult& res, const SystemParams& params, double threshold = 0.01);

struct AmortizedEstimate {
    double value = 0.0;
    /// Delta-method standard error of the ratio, from batch means over the
    /// conditional sample in departure order.
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Plug-in estimate of the effective cost rate
/// (E[cumulative(c1, T1) | T1 >= t] - cumulative(c1, t)) / (E[T1 | T1 >= t] - t).
/// Throws InsufficientSample below `min_samples` conditional observations.
AmortizedEstimate amortized_index(const SimResult& res, const HoldingCostFn& c1, double t,
                                  std::size_t min_samples = 1000);

/// |mu1 c1_eff(alpha) - mu2 c2| in units of the estimator's standard error.
VerificationReport check_amortized_fixed_point(const SimResult& res, const SystemParams& params,
                                               const HoldingCostFn& c1, double c2, double alpha,
                                               double threshold = 3.0);

struct Claim1Terms {
    double alpha_star = 0.0;
    /// mu1 E[r(t1 + X)]
    double lhs = 0.0;
    /// (mu1 - lambda1) E[r(alpha* - I1)] + lambda1 E[r(alpha* + X)]
    double rhs = 0.0;
};

/// Both sides of the optimality inequality for oldest class-1 ages at or
/// beyond alpha*, with X ~ Exp(mu1 - lambda1) and I1 ~ Exp(lambda1).
/// Requires a finite alpha* and lambda1 > 0; throws std::invalid_argument for t1 < alpha*.
Claim1Terms claim1_terms(const SystemParams& params, const NetCost& nc, double t1);

/// For t1 > alpha*: statistic RHS - LHS against 1e-8. At t1 == alpha*:
/// statistic |LHS - RHS| / |LHS| against 1e-6.
VerificationReport check_claim1(const SystemParams& params, const NetCost& nc, double t1);

/// Forward and backward exponential-shift identities for x^k, k = 1..degree,
/// both sides by quadrature. Statistic is the largest relative residual.
VerificationReport check_exp_formula(int degree, double x0, double theta, double threshold = 1e-8);

/// Relative finite-difference residual of r'(t) = c'(t) + lambda1 c(t).
VerificationReport check_r_derivative(const NetCost& nc, double lambda1, double t, double h = 1e-4,
                                      double threshold = 1e-6);

enum class TailError { Binomial, BatchMeans };

/// Largest |empirical - exp(-(mu1 - lambda1) t)| over t in multipliers/(mu1 - lambda1),
/// in standard errors of the Q0 sojourn sample: binomial (independent
/// sojourns) or batch means over the sojourns in departure order.
VerificationReport check_q0_tail(const SimResult& res, const SystemParams& params,
                                 std::span<const double> multipliers, double threshold = 3.0,
                                 TailError error = TailError::Binomial);

/// Conditional survival P[T1 > t] / P[T1 > alpha] against
/// exp(-(mu1 - lambda1)(t - alpha)), offsets t - alpha given in units of
/// 1/(mu1 - lambda1). Statistic in batch-means standard errors of the ratio
/// estimator over the class-1 sample in departure order.
VerificationReport check_tail_beyond_alpha(const SimResult& res, const SystemParams& params, double alpha,
                                           std::span<const double> multipliers, double threshold = 3.0);

/// Class-1 survival at ages t <= alpha under Overtake(alpha) against
/// P-Prio(2;1) on the same sample path, in two-sample standard errors.
VerificationReport check_tail_below_alpha(const SimResult& overtake, const SimResult& prio21, double alpha,
                                          std::span<const double> ts, double threshold = 3.0);

struct ConvexityResult {
    std::vector<double> alphas;
    /// costs[i][r]: time-average cost at alphas[i], replication r.
    std::vector<std::vector<double>> costs;
    std::vector<double> means;
    std::vector<double> two_sigma;
    std::size_t argmin = 0;
    /// Adjacent grid steps moving away from the argmin whose mean paired
    /// cost difference is below -2 sigma.
    std::size_t violations = 0;
    std::vector<std::uint64_t> seeds;
};

/// Simulates Overtake(alpha) over the grid with common random numbers:
/// replication r uses derive_seed(base_seed, {r}) at every grid point.
ConvexityResult convexity_sweep(const SystemParams& params, const HoldingCostFn& c1, double c2,
                                std::span<const double> alphas, const SimOptions& opts, std::size_t replications,
                                std::uint64_t base_seed, unsigned workers = 0);

/// Statistic = violations + (argmin not adjacent to alpha* ? 1 : 0), where
/// adjacency allows the argmin to be any grid point within one spacing of
/// alpha* or statistically tied (2 sigma) with one. A grid that does not
/// span alpha* is never adjacent. Threshold 0.
VerificationReport check_convexity(const ConvexityResult& sweep, double alpha_star);

/// Validates the grid (sorted, >= 7 points, spanning alpha*), runs the sweep
/// and checks it.
VerificationReport check_convexity(const SystemParams& params, const HoldingCostFn& c1, double c2,
                                   std::span<const double> alphas, const SimOptions& opts, std::size_t replications,
                                   std::uint64_t base_seed, unsigned workers = 0);

}  // namespace tvhc
