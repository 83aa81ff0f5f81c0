// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
// Protocol, fixed here and nowhere else: base seed 12345, 10^6 departures
// per run of which the first 10% are warmup, 10 replications per sweep and
// convexity grid point, common random numbers across policies.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tvhc/experiment.hpp"
#include "tvhc/optimal.hpp"
#include "tvhc/rng.hpp"
#include "tvhc/stats.hpp"
#include "tvhc/verify.hpp"

using namespace tvhc;

namespace {

constexpr std::uint64_t kSeed = 12345;
constexpr std::uint64_t kDepartures = 1'000'000;
constexpr std::uint64_t kWarmup = 100'000;
constexpr std::size_t kReps = 10;

// Tolerances and thresholds of the criteria.
constexpr double kAlphaAt0Tol = 0.01;
constexpr double kAlphaAt098Tol = 0.02;
constexpr double kHeavyTrafficTol = 0.001;
constexpr double kQuadraticTol = 1e-6;
constexpr double kMm1RelTol = 0.02;
constexpr double kConservationTol = 0.01;
constexpr double kTailSe = 3.0;
constexpr double kClaim1Slack = 1e-8;
constexpr double kClaim1EqualityGap = 1e-6;
constexpr double kExpFormulaTol = 1e-8;
constexpr double kRDerivTol = 1e-6;
constexpr double kAaltoGain = 0.40;
constexpr double kPrioGain = 0.30;
constexpr double kAmortizedSe = 3.0;

SimOptions protocol(std::uint64_t seed, bool tails = false) {
    SimOptions o;
    o.horizon_events = kDepartures;
    o.warmup_events = kWarmup;
    o.seed = seed;
    o.record_tails = tails;
    return o;
}

ExperimentConfig family_config(const FamilySetup& setup) {
    ExperimentConfig cfg;
    cfg.setup = setup;
    cfg.replications = kReps;
    cfg.base_seed = kSeed;
    cfg.sim = protocol(kSeed);
    cfg.convexity.replications = kReps;
    return cfg;
}

// Independent closed forms of the optimal overtake age.
double deadline_oracle(double rho) { return 10.0 - std::log(30.0) / (3.0 - 2.25 * rho); }
double quadratic_oracle(double rho) {
    const double a = 1.0 / (1.0 - 0.9 * rho);
    return std::max(0.0, -a + std::sqrt(90.0 - a * a));
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

template <class... Args>
std::string cat(const Args&... args) {
    std::ostringstream os;
    os.precision(6);
    (os << ... << args);
    return os.str();
}

struct Sweeps {
    SweepResult deadline;
    SweepResult quadratic;
};

const SummaryRow* find(const SweepResult& r, double rho, const std::string& policy) {
    for (const SummaryRow& s : r.summary) {
        if (s.rho == rho && s.policy == policy) {
            return &s;
        }
    }
    return nullptr;
}

Outcome c1_deadline_alpha() {
    const FamilySetup d = deadline_family();
    const AlphaDecision a0 = solve_alpha_star(d.params_at(0.0), d.c1, d.c2);
    const AlphaDecision a98 = solve_alpha_star(d.params_at(0.98), d.c1, d.c2);
    const double limit = alpha_star_heavy_traffic_limit(Family::Deadline);
    const double oracle_limit = 10.0 - std::log(30.0) / 0.75;
    const bool ok = a0.is_finite() && std::abs(a0.age() - 8.866) <= kAlphaAt0Tol && a98.is_finite() &&
                    std::abs(a98.age() - 5.722) <= kAlphaAt098Tol && std::abs(limit - 5.465) <= kHeavyTrafficTol &&
                    std::abs(limit - oracle_limit) <= 1e-12 &&
                    std::abs(a0.age() - deadline_oracle(0.0)) <= 1e-6 &&
                    std::abs(a98.age() - deadline_oracle(0.98)) <= 1e-6;
    return {ok, cat("alpha*(0)=", a0.age(), " alpha*(0.98)=", a98.age(), " limit=", limit)};
}

Outcome c2_quadratic_alpha() {
    const FamilySetup q = quadratic_family();
    double worst = 0.0;
    for (int i = 0; i <= 18; ++i) {
        const double rho = 0.05 * i;
        const AlphaDecision a = solve_alpha_star(q.params_at(rho), q.c1, q.c2);
        worst = std::max(worst, a.is_finite() ? std::abs(a.age() - quadratic_oracle(rho)) : INFINITY);
    }
    bool zeros = true;
    for (double rho : {0.95, 0.98}) {
        zeros = zeros && solve_alpha_star(q.params_at(rho), q.c1, q.c2).is_zero();
    }
    return {worst <= kQuadraticTol && zeros,
            cat("max |solver - closed form| on rho=0..0.9 step 0.05: ", worst, "; zero at 0.95, 0.98: ",
                zeros ? "yes" : "no")};
}

Outcome c3_mm1() {
    const SystemParams p{0.5, 0.0, 1.0, 1.0};
    const SimResult r = simulate(p, PolicySpec::fcfs(), HoldingCostFn::constant(1.0), 0.0, protocol(kSeed));
    const double m = stats::mean(r.t1_samples);
    const double rel = std::abs(m - 2.0) / 2.0;
    return {rel <= kMm1RelTol, cat("E[T]=", m, " relative error ", rel)};
}

Outcome c4_conservation(const Sweeps& s) {
    // Per sweep point: mean of the signed residuals over the replications.
    std::map<std::tuple<std::string, double, std::string>, std::vector<double>> points;
    double worst_single = 0.0;
    for (const SweepResult* r : {&s.deadline, &s.quadratic}) {
        for (const SweepRow& row : r->rows) {
            if (!row.unstable) {
                points[{row.family, row.rho, row.policy}].push_back(row.conservation_residual);
                worst_single = std::max(worst_single, std::abs(row.conservation_residual));
            }
        }
    }
    double worst = 0.0;
    std::string where;
    std::size_t failing = 0;
    for (const auto& [key, v] : points) {
        const double e = std::abs(stats::mean(v));
        if (e > kConservationTol) {
            ++failing;
        }
        if (e > worst) {
            worst = e;
            where = cat(std::get<0>(key), ",rho=", std::get<1>(key), ",", std::get<2>(key));
        }
    }
    return {failing == 0 && !points.empty(),
            cat(failing, "/", points.size(), " points above 1%; worst pooled ", worst, " at ", where,
                "; worst single replication ", worst_single)};
}

struct TailRun {
    SystemParams params;
    AlphaDecision alpha = AlphaDecision::zero();
    SimResult res;
};

TailRun deadline_tail_run() {
    const FamilySetup d = deadline_family();
    TailRun t;
    t.params = d.params_at(0.8);
    t.alpha = solve_alpha_star(t.params, d.c1, d.c2);
    t.res = simulate_overtake(t.params, t.alpha, d.c1, d.c2, protocol(kSeed, true));
    return t;
}

Outcome c5_q0_tail(const TailRun& t) {
    const std::vector<double> mult{0.5, 1.0, 2.0, 4.0};
    const VerificationReport r = check_q0_tail(t.res, t.params, mult, kTailSe, TailError::Binomial);
    return {r.passed, cat("max z=", r.statistic, " (", r.detail, ")")};
}

Outcome c6_tail_beyond(const TailRun& t) {
    const std::vector<double> mult{0.5, 1.0, 2.0};
    const VerificationReport r = check_tail_beyond_alpha(t.res, t.params, t.alpha.age(), mult, kTailSe);
    return {r.passed, cat("max z=", r.statistic, " (", r.detail, ")")};
}

Outcome c7_claim1() {
    double worst_slack = 0.0;
    double worst_gap = 0.0;
    std::size_t loads = 0;
    for (const FamilySetup& f : {deadline_family(), quadratic_family()}) {
        const NetCost nc = f.net_cost();
        for (double rho : ExperimentConfig{}.rho_grid) {
            const SystemParams p = f.params_at(rho);
            const AlphaDecision a = solve_alpha_star(p, f.c1, f.c2);
            if (!a.is_finite()) {
                continue;
            }
            ++loads;
            const Claim1Terms eq = claim1_terms(p, nc, a.age());
            worst_gap = std::max(worst_gap, std::abs(eq.lhs - eq.rhs) / std::abs(eq.lhs));
            for (int k = 1; k <= 20; ++k) {
                const Claim1Terms c = claim1_terms(p, nc, a.age() + 0.5 * k);
                worst_slack = std::max(worst_slack, c.rhs - c.lhs);
            }
        }
    }
    return {worst_slack <= kClaim1Slack && worst_gap <= kClaim1EqualityGap,
            cat(loads, " loads; max RHS-LHS above alpha* ", worst_slack, "; max relative gap at alpha* ", worst_gap)};
}

Outcome c8_exp_and_rprime() {
    Xoshiro256 rng(derive_seed(kSeed, {8}));
    double worst_exp = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x0 = 10.0 * rng.uniform();
        const double theta = 0.2 + 4.8 * rng.uniform();
        worst_exp = std::max(worst_exp, check_exp_formula(4, x0, theta, kExpFormulaTol).statistic);
    }
    double worst_r = 0.0;
    const double h = 1e-4;
    for (const FamilySetup& f : {deadline_family(), quadratic_family()}) {
        const NetCost nc = f.net_cost();
        const std::vector<double> bps = nc.breakpoints();
        for (double rho : {0.2, 0.5, 0.8, 0.95}) {
            const double lambda1 = f.params_at(rho).lambda1;
            int n = 0;
            while (n < 50) {
                const double t = 2.0 * h + 20.0 * rng.uniform();
                if (std::any_of(bps.begin(), bps.end(), [&](double b) { return std::abs(t - b) <= 2.0 * h; })) {
                    continue;
                }
                worst_r = std::max(worst_r, check_r_derivative(nc, lambda1, t, h, kRDerivTol).statistic);
                ++n;
            }
        }
    }
    return {worst_exp <= kExpFormulaTol && worst_r <= kRDerivTol,
            cat("exp formula max residual ", worst_exp, "; r' max residual ", worst_r)};
}

Outcome c9_convexity() {
    bool ok = true;
    std::string detail;
    for (const auto& [setup, rho] : {std::pair{deadline_family(), 0.8}, std::pair{quadratic_family(), 0.5}}) {
        ExperimentConfig cfg = family_config(setup);
        cfg.convexity.rho = rho;
        const ConvexityRun run = run_convexity(cfg);
        ok = ok && run.report.passed && run.result.alphas.size() == 11;
        detail += cat(family_name(setup.family), " rho=", rho, ": alpha*=", run.alpha_star.age(), " argmin=",
                      run.result.alphas[run.result.argmin], " violations=", run.result.violations, "; ");
    }
    return {ok, detail};
}

Outcome c10_ordering(const Sweeps& s) {
    const std::vector<std::string> order{"lookahead", "aalto", "gen_cmu", "pprio21"};
    std::size_t checked = 0;
    std::string broken;
    for (const SweepResult* r : {&s.deadline, &s.quadratic}) {
        for (double rho : ExperimentConfig{}.rho_grid) {
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const SummaryRow* a = find(*r, rho, order[i]);
                const SummaryRow* b = find(*r, rho, order[i + 1]);
                if (a == nullptr || b == nullptr) {
                    broken += cat(" missing ", order[i], "/", order[i + 1], " at ", rho);
                    continue;
                }
                ++checked;
                if (!(a->mean_cost - a->two_sigma <= b->mean_cost + b->two_sigma)) {
                    broken += cat(" ", a->family, ",rho=", rho, ":", order[i], ">", order[i + 1]);
                }
            }
        }
    }
    return {broken.empty() && checked > 0, cat(checked, " pairs checked", broken.empty() ? "" : ";", broken)};
}

Outcome c11_improvements(const Sweeps& s) {
    const SummaryRow* la9 = find(s.deadline, 0.9, "lookahead");
    const SummaryRow* aa9 = find(s.deadline, 0.9, "aalto");
    const SummaryRow* la95 = find(s.deadline, 0.95, "lookahead");
    const SummaryRow* pr95 = find(s.deadline, 0.95, "prio");
    if (!la9 || !aa9 || !la95 || !pr95) {
        return {false, "missing sweep points"};
    }
    // "At least X% below": 1 - C_LookAhead / C_other >= X. The ratio reading
    // C_other / C_LookAhead - 1 is reported alongside.
    const double below_aalto = 1.0 - la9->mean_cost / aa9->mean_cost;
    const double below_prio = 1.0 - la95->mean_cost / pr95->mean_cost;
    return {below_aalto >= kAaltoGain && below_prio >= kPrioGain,
            cat("rho=0.9 LookAhead ", la9->mean_cost, "+-", la9->two_sigma, " vs Aalto ", aa9->mean_cost, "+-",
                aa9->two_sigma, ": ", 100.0 * below_aalto, "% below (need ", 100.0 * kAaltoGain,
                "%), Aalto/LookAhead=", aa9->mean_cost / la9->mean_cost, "; rho=0.95 LookAhead ", la95->mean_cost,
                "+-", la95->two_sigma, " vs prio ", pr95->mean_cost, "+-", pr95->two_sigma, ": ",
                100.0 * below_prio, "% below (need ", 100.0 * kPrioGain,
                "%), prio/LookAhead=", pr95->mean_cost / la95->mean_cost)};
}

Outcome c12_amortized() {
    double worst = 0.0;
    std::string detail;
    for (const FamilySetup& f : {deadline_family(), quadratic_family()}) {
        for (double rho : {0.5, 0.8}) {
            const SystemParams p = f.params_at(rho);
            const AlphaDecision a = solve_alpha_star(p, f.c1, f.c2);
            const SimResult r = simulate_overtake(p, a, f.c1, f.c2, protocol(kSeed));
            const VerificationReport rep = check_amortized_fixed_point(r, p, f.c1, f.c2, a.age(), kAmortizedSe);
            worst = std::max(worst, std::isnan(rep.statistic) ? INFINITY : rep.statistic);
            detail += cat(family_name(f.family), ",rho=", rho, ": z=", rep.statistic, "; ");
        }
    }
    return {worst <= kAmortizedSe, detail};
}

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) {
        ++failures;
    }
    std::printf("%s %2d %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

}  // namespace

int main() {
    report(1, "deadline optimal overtake age", c1_deadline_alpha);
    report(2, "quadratic optimal overtake age", c2_quadratic_alpha);
    report(3, "M/M/1 mean response time", c3_mm1);

    std::printf("running sweeps: 2 families x 7 loads x 6 policies x %zu replications\n", kReps);
    std::fflush(stdout);
    Sweeps sweeps;
    sweeps.deadline = run_sweep(family_config(deadline_family()));
    sweeps.quadratic = run_sweep(family_config(quadratic_family()));

    report(4, "conservation law", [&] { return c4_conservation(sweeps); });
    const TailRun tail = deadline_tail_run();
    report(5, "Q0 sojourn tail", [&] { return c5_q0_tail(tail); });
    report(6, "class-1 tail beyond alpha*", [&] { return c6_tail_beyond(tail); });
    report(7, "optimality inequality", c7_claim1);
    report(8, "exponential shift and r' identities", c8_exp_and_rprime);
    report(9, "convexity in the overtake age", c9_convexity);
    report(10, "policy ordering", [&] { return c10_ordering(sweeps); });
    report(11, "improvements over Aalto and strict priority", [&] { return c11_improvements(sweeps); });
    report(12, "amortized fixed point", c12_amortized);

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
