#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tvhc/family.hpp"
#include "tvhc/policy.hpp"
#include "tvhc/serialization.hpp"
#include "tvhc/simulator.hpp"
#include "tvhc/verify.hpp"

namespace tvhc {

struct ConvexityConfig {
    double rho = 0.8;
    /// Empty: eleven unit-spaced points around alpha*.
    std::vector<double> alpha_grid;
    std::size_t replications = 10;
};

struct VerifyConfig {
    std::vector<double> rhos{0.5, 0.8};
    /// Points of the randomized exp-formula and r' grids.
    std::size_t random_points = 50;
    bool simulation = true;
    bool convexity = true;
    /// Simulation length of the statistical checks; longer than a sweep
    /// replication because a single path carries them.
    SimOptions sim{10'000'000, 1'000'000, 1, true, false};
};

struct ExperimentConfig {
    FamilySetup setup = deadline_family();
    std::vector<double> rho_grid{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98};
    std::vector<PolicySpec> policies = standard_policies();
    std::size_t replications = 10;
    std::uint64_t base_seed = 12345;
    SimOptions sim;
    /// 0 picks the hardware concurrency.
    unsigned threads = 0;
    ConvexityConfig convexity;
    VerifyConfig verify;
};

/// Parses a config document. Unknown keys, bad values and invalid cost
/// functions raise ConfigError. Fixed families reject rate or cost
/// overrides; "custom" requires mu1, mu2, class1_fraction, c1 and c2.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Seed of replication `rep` at rho_grid[rho_index]; shared by all policies.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t rho_index, std::size_t rep);

struct SweepRow {
    std::string family;
    double rho = 0.0;
    std::string policy;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    double mean_cost = 0.0;
    double mean_t1 = 0.0;
    double mean_t2 = 0.0;
    double overtake_age = 0.0;
    /// (rho1 E[T1] + rho2 E[T2] - W) / W.
    double conservation_residual = 0.0;
    /// Set for the placeholder row of an unstable load.
    bool unstable = false;
};

struct SummaryRow {
    std::string family;
    double rho = 0.0;
    std::string policy;
    std::size_t replications = 0;
    double mean_cost = 0.0;
    /// Two standard errors of the mean across replications.
    double two_sigma = 0.0;
    /// mean_cost over the LookAhead mean cost at the same load (NaN if
    /// LookAhead was not run).
    double ratio_to_lookahead = 0.0;
};

struct SweepResult {
    /// Sorted by (family, rho, policy, replication).
    std::vector<SweepRow> rows;
    /// Per (rho, policy) aggregates plus a "prio" row, the pointwise better
    /// of pprio12 and pprio21 when both were run.
    std::vector<SummaryRow> summary;
};

SweepResult run_sweep(const ExperimentConfig& cfg);
void write_sweep_csv(std::ostream& os, const SweepResult& r);
void write_summary_csv(std::ostream& os, const SweepResult& r);

struct AlphaCurveRow {
    double rho = 0.0;
    std::string policy;
    /// Empty for unstable loads.
    std::optional<AlphaDecision> age;
};

/// Overtake ages of every index policy at every load in rho_grid.
std::vector<AlphaCurveRow> run_alpha_curve(const ExperimentConfig& cfg);
void write_alpha_curve_csv(std::ostream& os, const std::vector<AlphaCurveRow>& rows);

/// Unit-spaced 11-point grid containing the integer nearest alpha*,
/// shifted to start at 0 or above.
std::vector<double> default_alpha_grid(const AlphaDecision& alpha_star);

struct ConvexityRun {
    double rho = 0.0;
    AlphaDecision alpha_star = AlphaDecision::zero();
    ConvexityResult result;
    VerificationReport report;
};

ConvexityRun run_convexity(const ExperimentConfig& cfg);
void write_convexity_csv(std::ostream& os, const ConvexityRun& run);

/// Runs the verification checks for the configured family. Unstable loads
/// yield a passing "skipped" report.
std::vector<VerificationReport> run_verify(const ExperimentConfig& cfg);

}  // namespace tvhc
