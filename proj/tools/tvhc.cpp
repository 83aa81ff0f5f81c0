// Command line front end: overtake ages, single simulations, load sweeps,
// convexity scans and the verification suite.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tvhc/experiment.hpp"
#include "tvhc/format.hpp"
#include "tvhc/optimal.hpp"
#include "tvhc/serialization.hpp"
#include "tvhc/stats.hpp"
#include "tvhc/verify.hpp"

namespace {

using nlohmann::json;
using namespace tvhc;

constexpr int kConfigError = 1;
constexpr int kVerificationFailure = 2;
constexpr int kRuntimeError = 3;

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::string policies;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON experiment config (defaults to the deadline family)");
    sub->add_option("--out", c.out, "Output file (default: stdout)");
    sub->add_option("--seed", c.seed, "Override base_seed");
    sub->add_option("--reps", c.reps, "Override replications")->check(CLI::PositiveNumber);
    sub->add_option("--policies", c.policies,
                    "Comma-separated policies, e.g. lookahead,aalto,overtake:3.5");
}

std::vector<PolicySpec> parse_policy_list(const std::string& text) {
    std::vector<PolicySpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            out.push_back(policy_from_json(json(item)));
        } else {
            const std::string age = item.substr(colon + 1);
            json j{{"policy", item.substr(0, colon)}};
            if (age == "inf") {
                j["alpha"] = "inf";
            } else {
                try {
                    std::size_t used = 0;
                    j["alpha"] = std::stod(age, &used);
                    if (used != age.size()) {
                        throw std::invalid_argument(age);
                    }
                } catch (const std::logic_error&) {
                    throw ConfigError("bad overtake age '" + age + "'");
                }
            }
            out.push_back(policy_from_json(j));
        }
    }
    if (out.empty()) {
        throw ConfigError("--policies lists no policy");
    }
    return out;
}

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
    if (c.seed) {
        cfg.base_seed = *c.seed;
    }
    if (c.reps) {
        cfg.replications = *c.reps;
        cfg.convexity.replications = *c.reps;
    }
    if (!c.policies.empty()) {
        cfg.policies = parse_policy_list(c.policies);
    }
    return cfg;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw ConfigError("cannot open output file '" + path + "'");
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

SystemParams params_at_checked(const ExperimentConfig& cfg, double rho) {
    SystemParams p = cfg.setup.params_at(rho);
    try {
        p.validate();
    } catch (const UnstableSystem& e) {
        throw ConfigError(e.what());
    }
    return p;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(fmt_double(x)); }

int cmd_alpha(const Common& c, double rho) {
    const ExperimentConfig cfg = resolve(c);
    const SystemParams params = params_at_checked(cfg, rho);
    json j{{"family", std::string(family_name(cfg.setup.family))},
           {"rho", rho},
           {"lambda1", params.lambda1},
           {"lambda2", params.lambda2},
           {"alpha_star", decision_to_json(solve_alpha_star(params, cfg.setup.c1, cfg.setup.c2))}};
    if (cfg.setup.family != Family::Custom) {
        j["closed_form"] = alpha_star_closed_form(cfg.setup.family, rho);
    }
    json ages = json::object();
    for (const PolicySpec& p : cfg.policies) {
        if (p.is_index_policy()) {
            ages[p.label()] = decision_to_json(overtake_age(p, params, cfg.setup.c1, cfg.setup.c2));
        }
    }
    j["overtake_ages"] = ages;
    Output out(c.out);
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const Common& c, double rho, const std::string& policy, std::optional<std::uint64_t> events,
                 const std::string& dump) {
    ExperimentConfig cfg = resolve(c);
    const SystemParams params = params_at_checked(cfg, rho);
    const PolicySpec p = parse_policy_list(policy).front();
    SimOptions opts = cfg.sim;
    if (events) {
        opts.horizon_events = *events;
        opts.warmup_events = *events / 10;
    }
    opts.seed = c.seed ? *c.seed : cfg.base_seed;
    opts.record_jobs = !dump.empty();
    try {
        opts.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const SimResult res = simulate(params, p, cfg.setup.c1, cfg.setup.c2, opts);
    if (!dump.empty()) {
        Output d(dump);
        write_job_csv(d.stream(), res);
    }
    const VerificationReport cons = check_conservation(res, params);
    json j{{"family", std::string(family_name(cfg.setup.family))},
           {"rho", rho},
           {"policy", p.label()},
           {"seed", opts.seed},
           {"mean_cost", res.total_cost / res.horizon},
           {"mean_t1", res.t1_samples.empty() ? json(nullptr) : json(stats::mean(res.t1_samples))},
           {"mean_t2", res.t2_samples.empty() ? json(nullptr) : json(stats::mean(res.t2_samples))},
           {"overtake_age", number(res.overtake_age)},
           {"conservation_residual", cons.statistic},
           {"horizon", res.horizon},
           {"utilization", res.busy_time / res.horizon},
           {"counts",
            {{"arrivals1", res.counts.arrivals1},
             {"arrivals2", res.counts.arrivals2},
             {"departures", res.counts.departures},
             {"promotions", res.counts.promotions},
             {"preemptions", res.counts.preemptions}}}};
    Output out(c.out);
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int cmd_sweep(const Common& c, std::string summary) {
    const ExperimentConfig cfg = resolve(c);
    const SweepResult r = run_sweep(cfg);
    Output out(c.out);
    write_sweep_csv(out.stream(), r);
    if (summary.empty() && !c.out.empty()) {
        summary = c.out + ".summary.csv";
    }
    if (summary.empty()) {
        write_summary_csv(std::cerr, r);
    } else {
        Output s(summary);
        write_summary_csv(s.stream(), r);
    }
    return 0;
}

int cmd_alpha_curve(const Common& c) {
    const ExperimentConfig cfg = resolve(c);
    Output out(c.out);
    write_alpha_curve_csv(out.stream(), run_alpha_curve(cfg));
    return 0;
}

int cmd_convexity(const Common& c, std::optional<double> rho) {
    ExperimentConfig cfg = resolve(c);
    if (rho) {
        cfg.convexity.rho = *rho;
    }
    const ConvexityRun run = run_convexity(cfg);
    Output out(c.out);
    write_convexity_csv(out.stream(), run);
    std::cerr << report_to_json(run.report).dump() << '\n';
    return run.report.passed ? 0 : kVerificationFailure;
}

int cmd_verify(const Common& c) {
    const ExperimentConfig cfg = resolve(c);
    const std::vector<VerificationReport> reports = run_verify(cfg);
    Output out(c.out);
    bool all = true;
    for (const VerificationReport& r : reports) {
        out.stream() << report_to_json(r).dump() << '\n';
        all = all && r.passed;
    }
    return all ? 0 : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-class scheduling with time-varying holding costs"};
    app.require_subcommand(1);

    Common alpha_c, sim_c, sweep_c, curve_c, conv_c, verify_c;
    double alpha_rho = 0.0;
    double sim_rho = 0.0;
    std::string sim_policy = "lookahead";
    std::optional<std::uint64_t> sim_events;
    std::string sim_dump;
    std::string sweep_summary;
    std::optional<double> conv_rho;

    auto* alpha = app.add_subcommand("alpha", "Optimal and per-policy overtake ages at one load");
    add_common(alpha, alpha_c);
    alpha->add_option("--rho", alpha_rho, "Load")->required();

    auto* sim = app.add_subcommand("simulate", "Run one simulation and print summary JSON");
    add_common(sim, sim_c);
    sim->add_option("--rho", sim_rho, "Load")->required();
    sim->add_option("--policy", sim_policy, "Policy, e.g. lookahead or overtake:3.5");
    sim->add_option("--events", sim_events, "Departures to simulate (warmup is 10%)");
    sim->add_option("--dump", sim_dump, "Write the per-job CSV log here");

    auto* sweep = app.add_subcommand("sweep", "Load sweep over policies and replications (CSV)");
    add_common(sweep, sweep_c);
    sweep->add_option("--summary", sweep_summary, "Aggregate CSV (default: <out>.summary.csv, else stderr)");

    auto* curve = app.add_subcommand("alpha-curve", "Overtake age per policy across the load grid (CSV)");
    add_common(curve, curve_c);

    auto* conv = app.add_subcommand("convexity", "Simulated cost over an overtake-age grid (CSV)");
    add_common(conv, conv_c);
    conv->add_option("--rho", conv_rho, "Load (overrides convexity.rho)");

    auto* verify = app.add_subcommand("verify", "Run the verification checks; one JSON report per line");
    add_common(verify, verify_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*alpha) return cmd_alpha(alpha_c, alpha_rho);
        if (*sim) return cmd_simulate(sim_c, sim_rho, sim_policy, sim_events, sim_dump);
        if (*sweep) return cmd_sweep(sweep_c, sweep_summary);
        if (*curve) return cmd_alpha_curve(curve_c);
        if (*conv) return cmd_convexity(conv_c, conv_rho);
        if (*verify) return cmd_verify(verify_c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kRuntimeError;
}
