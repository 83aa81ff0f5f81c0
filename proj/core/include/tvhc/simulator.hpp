#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tvhc/cost.hpp"
#include "tvhc/decision.hpp"
#include "tvhc/params.hpp"
#include "tvhc/policy.hpp"

namespace tvhc {

struct SimOptions {
    /// Departures simulated, warmup included.
    std::uint64_t horizon_events = 1'000'000;
    /// Leading departures discarded.
    std::uint64_t warmup_events = 100'000;
    std::uint64_t seed = 1;
    /// Keep Q0 sojourns.
    bool record_tails = false;
    /// Keep the per-job log.
    bool record_jobs = false;

    void validate() const;
};

struct JobRecord {
    int class_id = 1;
    double arrival = 0.0;
    double departure = 0.0;
    /// Time a class-1 job entered Q0.
    std::optional<double> promotion;
};

struct EventCounts {
    std::uint64_t arrivals1 = 0;
    std::uint64_t arrivals2 = 0;
    std::uint64_t departures = 0;
    std::uint64_t promotions = 0;
    std::uint64_t preemptions = 0;
};

struct SimResult {
    /// Response times of class-1 / class-2 jobs departing after warmup, in
    /// departure order.
    std::vector<double> t1_samples;
    std::vector<double> t2_samples;
    /// Departure minus promotion time for promoted class-1 jobs departing
    /// after warmup (only with record_tails).
    std::vector<double> q0_sojourns;
    /// Only with record_jobs.
    std::vector<JobRecord> jobs;
    /// Sum over recorded jobs of the holding cost accrued over their stay.
    double total_cost = 0.0;
    /// Server busy time inside the recording window.
    double busy_time = 0.0;
    /// Length of the recording window (from the last warmup departure to the
    /// final departure).
    double horizon = 0.0;
    std::uint64_t seed = 0;
    /// Overtake age used; NaN for FCFS.
    double overtake_age = 0.0;
    EventCounts counts;
};

/// Event-driven simulation of the two-class preemptive-resume M/M/1 queue.
///
/// Index policies run as Overtake(alpha) with alpha from overtake_age():
/// priority Q0 > Q2 > Q1, FCFS within each level, where Q0 holds class-1
/// jobs of age >= alpha. FCFS serves one global FIFO to completion.
///
/// Arrivals and job sizes come from four independent streams derived from
/// opts.seed (class-1 gaps, class-2 gaps, class-1 sizes, class-2 sizes), and
/// sizes are drawn at arrival, so runs with equal seeds see the same sample
/// path whatever the policy. Simultaneous events resolve as departure, then
/// class-1 arrival, class-2 arrival, promotion.
SimResult simulate(const SystemParams& params, const PolicySpec& p, const HoldingCostFn& c1, double c2,
                   const SimOptions& opts);

/// Overtake(alpha) for a precomputed decision.
SimResult simulate_overtake(const SystemParams& params, const AlphaDecision& alpha, const HoldingCostFn& c1,
                            double c2, const SimOptions& opts);

/// (sum_class1 cumulative(c1, T) + sum_class2 c2 T) / horizon.
double time_avg_cost(const SimResult& res, const HoldingCostFn& c1, double c2);

/// #{s > t} / n for every t.
std::vector<double> empirical_tail(std::span<const double> samples, std::span<const double> ts);

/// Writes `class,arrival,departure,promotion` rows for the recorded jobs.
void write_job_csv(std::ostream& os, const SimResult& res);

}  // namespace tvhc
