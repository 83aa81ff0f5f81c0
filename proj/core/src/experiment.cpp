#include "tvhc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "tvhc/format.hpp"
#include "tvhc/optimal.hpp"
#include "tvhc/parallel.hpp"
#include "tvhc/rng.hpp"
#include "tvhc/stats.hpp"

namespace tvhc {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
            allowed.end()) {
            throw ConfigError(std::string("unknown key '") + key + "' in " + where);
        }
    }
}

double positive(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(std::string("expected numeric field '") + key + "'");
    }
    const double v = j.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("'") + key + "' must be positive and finite");
    }
    return v;
}

std::size_t count(const json& v, const char* key) {
    if (!is_non_negative_integer(v) || v.get<std::size_t>() == 0) {
        throw ConfigError(std::string("'") + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> number_list(const json& v, const char* key, bool allow_inf) {
    if (!v.is_array()) {
        throw ConfigError(std::string("'") + key + "' must be an array");
    }
    std::vector<double> out;
    for (const json& x : v) {
        if (allow_inf && x.is_string() && x.get<std::string>() == "inf") {
            out.push_back(kInf);
        } else if (x.is_number()) {
            out.push_back(x.get<double>());
        } else {
            throw ConfigError(std::string("'") + key + "' must contain numbers");
        }
    }
    return out;
}

std::vector<double> rho_list(const json& v, const char* key) {
    std::vector<double> out = number_list(v, key, false);
    if (out.empty()) {
        throw ConfigError(std::string("'") + key + "' must not be empty");
    }
    for (double r : out) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw ConfigError(std::string("'") + key + "' entries must be finite and non-negative");
        }
    }
    return out;
}

json number_or_inf(double x) { return std::isinf(x) ? json("inf") : json(x); }

// Loads at which the system is stable; validates the rest of the setup.
bool stable_at(const FamilySetup& s, double rho) {
    try {
        s.params_at(rho).validate();
        return true;
    } catch (const UnstableSystem&) {
        return false;
    }
}

double mean_of(const std::vector<double>& x) { return x.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::mean(x); }

SweepRow simulate_row(const ExperimentConfig& cfg, std::size_t rho_index, const PolicySpec& p, std::size_t rep) {
    const FamilySetup& s = cfg.setup;
    const double rho = cfg.rho_grid[rho_index];
    const SystemParams params = s.params_at(rho);
    SimOptions opts = cfg.sim;
    opts.seed = replication_seed(cfg.base_seed, rho_index, rep);
    opts.record_tails = false;
    const SimResult res = simulate(params, p, s.c1, s.c2, opts);

    SweepRow row;
    row.family = std::string(family_name(s.family));
    row.rho = rho;
    row.policy = p.label();
    row.replication = rep;
    row.seed = opts.seed;
    row.mean_cost = res.total_cost / res.horizon;
    row.mean_t1 = mean_of(res.t1_samples);
    row.mean_t2 = mean_of(res.t2_samples);
    row.overtake_age = res.overtake_age;
    const double w = params.mean_work();
    const double lhs = params.rho1() * row.mean_t1 + (params.lambda2 > 0.0 ? params.rho2() * row.mean_t2 : 0.0);
    row.conservation_residual = (lhs - w) / w;
    return row;
}

bool row_less(const SweepRow& a, const SweepRow& b) {
    return std::tie(a.family, a.rho, a.policy, a.replication) < std::tie(b.family, b.rho, b.policy, b.replication);
}

std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
    std::map<std::tuple<std::string, double, std::string>, std::vector<double>> groups;
    for (const SweepRow& r : rows) {
        if (!r.unstable) {
            groups[{r.family, r.rho, r.policy}].push_back(r.mean_cost);
        }
    }
    std::vector<SummaryRow> out;
    std::map<std::pair<std::string, double>, double> lookahead;
    for (const auto& [key, costs] : groups) {
        SummaryRow s;
        std::tie(s.family, s.rho, s.policy) = key;
        s.replications = costs.size();
        s.mean_cost = stats::mean(costs);
        s.two_sigma = 2.0 * stats::std_error(costs);
        if (s.policy == "lookahead") {
            lookahead[{s.family, s.rho}] = s.mean_cost;
        }
        out.push_back(s);
    }
    // Pointwise better strict priority.
    std::vector<SummaryRow> prio;
    for (const SummaryRow& a : out) {
        if (a.policy != "pprio12") {
            continue;
        }
        for (const SummaryRow& b : out) {
            if (b.policy == "pprio21" && b.family == a.family && b.rho == a.rho) {
                SummaryRow p = a.mean_cost <= b.mean_cost ? a : b;
                p.policy = "prio";
                prio.push_back(p);
            }
        }
    }
    out.insert(out.end(), prio.begin(), prio.end());
    for (SummaryRow& s : out) {
        const auto it = lookahead.find({s.family, s.rho});
        s.ratio_to_lookahead =
            it == lookahead.end() ? std::numeric_limits<double>::quiet_NaN() : s.mean_cost / it->second;
    }
    std::sort(out.begin(), out.end(), [](const SummaryRow& a, const SummaryRow& b) {
        return std::tie(a.family, a.rho, a.policy) < std::tie(b.family, b.rho, b.policy);
    });
    return out;
}

std::string rho_tag(double rho) { return "rho=" + fmt_double(rho); }

VerificationReport tagged(VerificationReport r, const std::string& tag) {
    r.check_name += "[" + tag + "]";
    return r;
}

// Worst of a batch of reports of the same check; the statistics are
// compared on the common threshold.
VerificationReport worst_of(std::vector<VerificationReport> reports, const std::string& tag) {
    auto worst = std::max_element(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
        if (a.passed != b.passed) {
            return a.passed;
        }
        return a.statistic < b.statistic;
    });
    VerificationReport r = *worst;
    r.detail = std::to_string(reports.size()) + " points, worst: " + r.detail;
    return tagged(std::move(r), tag);
}

VerificationReport skipped(const std::string& name, const std::string& why) {
    VerificationReport r;
    r.check_name = name;
    r.statistic = 0.0;
    r.threshold = 0.0;
    r.passed = true;
    r.detail = "skipped: " + why;
    return r;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    reject_unknown(j,
                   {"family", "mu1", "mu2", "class1_fraction", "c1", "c2", "rho_grid", "policies", "replications",
                    "base_seed", "sim", "threads", "convexity", "verify"},
                   "config");
    ExperimentConfig cfg;

    Family fam = Family::Deadline;
    if (j.contains("family")) {
        if (!j.at("family").is_string()) {
            throw ConfigError("'family' must be a string");
        }
        try {
            fam = family_from_name(j.at("family").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    const bool has_override = j.contains("mu1") || j.contains("mu2") || j.contains("class1_fraction") ||
                              j.contains("c1") || j.contains("c2");
    if (fam == Family::Custom) {
        FamilySetup s;
        s.family = Family::Custom;
        s.mu1 = positive(j, "mu1");
        s.mu2 = positive(j, "mu2");
        if (!j.contains("class1_fraction") || !j.at("class1_fraction").is_number()) {
            throw ConfigError("expected numeric field 'class1_fraction'");
        }
        s.class1_fraction = j.at("class1_fraction").get<double>();
        if (!(s.class1_fraction > 0.0 && s.class1_fraction <= 1.0)) {
            throw ConfigError("'class1_fraction' must lie in (0, 1]");
        }
        if (!j.contains("c1")) {
            throw ConfigError("custom family needs a 'c1' cost function");
        }
        s.c1 = cost_from_json(j.at("c1"));
        if (!j.contains("c2") || !j.at("c2").is_number() || !(j.at("c2").get<double>() >= 0.0)) {
            throw ConfigError("'c2' must be a non-negative number");
        }
        s.c2 = j.at("c2").get<double>();
        cfg.setup = std::move(s);
    } else {
        if (has_override) {
            throw ConfigError("rates and costs are fixed for family '" + std::string(family_name(fam)) + "'");
        }
        cfg.setup = family_setup(fam);
    }

    if (j.contains("rho_grid")) {
        cfg.rho_grid = rho_list(j.at("rho_grid"), "rho_grid");
    }
    if (j.contains("policies")) {
        if (!j.at("policies").is_array() || j.at("policies").empty()) {
            throw ConfigError("'policies' must be a non-empty array");
        }
        cfg.policies.clear();
        for (const json& p : j.at("policies")) {
            cfg.policies.push_back(policy_from_json(p));
        }
    }
    if (j.contains("replications")) {
        cfg.replications = count(j.at("replications"), "replications");
    }
    if (j.contains("base_seed")) {
        if (!is_non_negative_integer(j.at("base_seed"))) {
            throw ConfigError("'base_seed' must be a non-negative integer");
        }
        cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    }
    if (j.contains("sim")) {
        reject_unknown(j.at("sim"), {"horizon_events", "warmup_events", "seed", "record_tails", "record_jobs"}, "sim");
        cfg.sim = sim_options_from_json(j.at("sim"), cfg.sim);
    }
    if (j.contains("threads")) {
        if (!is_non_negative_integer(j.at("threads"))) {
            throw ConfigError("'threads' must be a non-negative integer");
        }
        cfg.threads = j.at("threads").get<unsigned>();
    }
    if (j.contains("convexity")) {
        const json& c = j.at("convexity");
        if (!c.is_object()) {
            throw ConfigError("'convexity' must be an object");
        }
        reject_unknown(c, {"rho", "alpha_grid", "replications"}, "convexity");
        if (c.contains("rho")) {
            cfg.convexity.rho = rho_list(json::array({c.at("rho")}), "convexity.rho").front();
        }
        if (c.contains("alpha_grid")) {
            cfg.convexity.alpha_grid = number_list(c.at("alpha_grid"), "convexity.alpha_grid", true);
        }
        if (c.contains("replications")) {
            cfg.convexity.replications = count(c.at("replications"), "convexity.replications");
        }
    }
    if (j.contains("verify")) {
        const json& v = j.at("verify");
        if (!v.is_object()) {
            throw ConfigError("'verify' must be an object");
        }
        reject_unknown(v, {"rhos", "random_points", "simulation", "convexity", "sim"}, "verify");
        if (v.contains("sim")) {
            reject_unknown(v.at("sim"), {"horizon_events", "warmup_events"}, "verify.sim");
            cfg.verify.sim = sim_options_from_json(v.at("sim"), cfg.verify.sim);
        }
        if (v.contains("rhos")) {
            cfg.verify.rhos = rho_list(v.at("rhos"), "verify.rhos");
        }
        if (v.contains("random_points")) {
            cfg.verify.random_points = count(v.at("random_points"), "verify.random_points");
        }
        for (const char* key : {"simulation", "convexity"}) {
            if (v.contains(key)) {
                if (!v.at(key).is_boolean()) {
                    throw ConfigError(std::string("'verify.") + key + "' must be a boolean");
                }
                (std::string_view(key) == "simulation" ? cfg.verify.simulation : cfg.verify.convexity) =
                    v.at(key).get<bool>();
            }
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return parse_config(j);
}

json config_to_json(const ExperimentConfig& cfg) {
    json j{{"family", std::string(family_name(cfg.setup.family))}};
    if (cfg.setup.family == Family::Custom) {
        j["mu1"] = cfg.setup.mu1;
        j["mu2"] = cfg.setup.mu2;
        j["class1_fraction"] = cfg.setup.class1_fraction;
        j["c1"] = cost_to_json(cfg.setup.c1);
        j["c2"] = cfg.setup.c2;
    }
    j["rho_grid"] = cfg.rho_grid;
    j["policies"] = json::array();
    for (const PolicySpec& p : cfg.policies) {
        j["policies"].push_back(policy_to_json(p));
    }
    j["replications"] = cfg.replications;
    j["base_seed"] = cfg.base_seed;
    j["sim"] = sim_options_to_json(cfg.sim);
    j["sim"].erase("seed");
    j["threads"] = cfg.threads;
    json grid = json::array();
    for (double a : cfg.convexity.alpha_grid) {
        grid.push_back(number_or_inf(a));
    }
    j["convexity"] = {{"rho", cfg.convexity.rho}, {"alpha_grid", grid}, {"replications", cfg.convexity.replications}};
    j["verify"] = {{"rhos", cfg.verify.rhos},
                   {"random_points", cfg.verify.random_points},
                   {"simulation", cfg.verify.simulation},
                   {"convexity", cfg.verify.convexity},
                   {"sim",
                    {{"horizon_events", cfg.verify.sim.horizon_events},
                     {"warmup_events", cfg.verify.sim.warmup_events}}}};
    return j;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t rho_index, std::size_t rep) {
    return derive_seed(base_seed, {static_cast<std::uint64_t>(rho_index), static_cast<std::uint64_t>(rep)});
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    struct Task {
        std::size_t rho_index;
        std::size_t policy;
        std::size_t rep;
    };
    std::vector<Task> tasks;
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < cfg.rho_grid.size(); ++i) {
        if (!(cfg.rho_grid[i] > 0.0)) {
            throw ConfigError("sweep loads must be positive, got " + fmt_double(cfg.rho_grid[i]));
        }
        if (!stable_at(cfg.setup, cfg.rho_grid[i])) {
            std::cerr << "warning: load " << fmt_double(cfg.rho_grid[i]) << " is unstable, skipped\n";
            SweepRow w;
            w.family = std::string(family_name(cfg.setup.family));
            w.rho = cfg.rho_grid[i];
            w.policy = "unstable";
            w.unstable = true;
            rows.push_back(w);
            continue;
        }
        for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
            for (std::size_t r = 0; r < cfg.replications; ++r) {
                tasks.push_back({i, p, r});
            }
        }
    }
    std::vector<SweepRow> done = parallel_map(tasks.size(), cfg.threads, [&](std::size_t k) {
        const Task& t = tasks[k];
        return simulate_row(cfg, t.rho_index, cfg.policies[t.policy], t.rep);
    });
    rows.insert(rows.end(), done.begin(), done.end());
    std::stable_sort(rows.begin(), rows.end(), row_less);

    SweepResult out;
    out.summary = summarize(rows);
    out.rows = std::move(rows);
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
    os << "family,rho,policy,replication,seed,mean_cost,mean_t1,mean_t2,overtake_age,conservation_residual\n";
    for (const SweepRow& row : r.rows) {
        os << row.family << ',' << fmt_double(row.rho) << ',' << row.policy << ',';
        if (row.unstable) {
            os << ",,,,,,\n";
            continue;
        }
        os << row.replication << ',' << row.seed << ',' << fmt_double(row.mean_cost) << ','
           << fmt_double(row.mean_t1) << ',' << fmt_double(row.mean_t2) << ',' << fmt_double(row.overtake_age) << ','
           << fmt_double(row.conservation_residual) << '\n';
    }
}

void write_summary_csv(std::ostream& os, const SweepResult& r) {
    os << "family,rho,policy,replications,mean_cost,two_sigma,ratio_to_lookahead\n";
    for (const SummaryRow& s : r.summary) {
        os << s.family << ',' << fmt_double(s.rho) << ',' << s.policy << ',' << s.replications << ','
           << fmt_double(s.mean_cost) << ',' << fmt_double(s.two_sigma) << ','
           << fmt_double(s.ratio_to_lookahead) << '\n';
    }
}

std::vector<AlphaCurveRow> run_alpha_curve(const ExperimentConfig& cfg) {
    std::vector<AlphaCurveRow> rows;
    for (double rho : cfg.rho_grid) {
        const bool stable = stable_at(cfg.setup, rho);
        if (!stable) {
            std::cerr << "warning: load " << fmt_double(rho) << " is unstable, skipped\n";
        }
        for (const PolicySpec& p : cfg.policies) {
            if (!p.is_index_policy()) {
                continue;
            }
            AlphaCurveRow row{rho, p.label(), std::nullopt};
            if (stable) {
                row.age = overtake_age(p, cfg.setup.params_at(rho), cfg.setup.c1, cfg.setup.c2);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_alpha_curve_csv(std::ostream& os, const std::vector<AlphaCurveRow>& rows) {
    os << "rho,policy,overtake_age\n";
    for (const AlphaCurveRow& r : rows) {
        os << fmt_double(r.rho) << ',' << r.policy << ',' << (r.age ? fmt_double(r.age->age()) : "") << '\n';
    }
}

std::vector<double> default_alpha_grid(const AlphaDecision& alpha_star) {
    const double center = alpha_star.is_infinite() ? 5.0 : std::round(alpha_star.age());
    const double start = std::max(0.0, center - 5.0);
    std::vector<double> grid;
    for (int k = 0; k < 11; ++k) {
        grid.push_back(start + k);
    }
    return grid;
}

ConvexityRun run_convexity(const ExperimentConfig& cfg) {
    const double rho = cfg.convexity.rho;
    if (!(rho > 0.0) || !stable_at(cfg.setup, rho)) {
        throw ConfigError("convexity load " + fmt_double(rho) + " is not a positive stable load");
    }
    const SystemParams params = cfg.setup.params_at(rho);
    ConvexityRun run;
    run.rho = rho;
    run.alpha_star = solve_alpha_star(params, cfg.setup.c1, cfg.setup.c2);
    const std::vector<double> grid =
        cfg.convexity.alpha_grid.empty() ? default_alpha_grid(run.alpha_star) : cfg.convexity.alpha_grid;
    if (!std::is_sorted(grid.begin(), grid.end()) || grid.size() < 2) {
        throw ConfigError("convexity.alpha_grid must be sorted with at least two points");
    }
    run.result = convexity_sweep(params, cfg.setup.c1, cfg.setup.c2, grid, cfg.sim, cfg.convexity.replications,
                                 cfg.base_seed, cfg.threads);
    run.report = check_convexity(run.result, run.alpha_star.age());
    run.report.check_name += "[" + rho_tag(rho) + "]";
    return run;
}

void write_convexity_csv(std::ostream& os, const ConvexityRun& run) {
    os << "alpha,replications,mean_cost,two_sigma\n";
    const ConvexityResult& r = run.result;
    for (std::size_t i = 0; i < r.alphas.size(); ++i) {
        os << fmt_double(r.alphas[i]) << ',' << r.costs[i].size() << ',' << fmt_double(r.means[i]) << ','
           << fmt_double(r.two_sigma[i]) << '\n';
    }
}

std::vector<VerificationReport> run_verify(const ExperimentConfig& cfg) {
    const FamilySetup& s = cfg.setup;
    const NetCost nc = s.net_cost();
    std::vector<VerificationReport> out;

    // Randomized exp-formula grid, independent of the family.
    {
        Xoshiro256 rng(derive_seed(cfg.base_seed, {0xe4f0}));
        std::vector<VerificationReport> batch;
        for (std::size_t k = 0; k < cfg.verify.random_points; ++k) {
            const double x0 = 10.0 * rng.uniform();
            const double theta = 0.2 + 4.8 * rng.uniform();
            batch.push_back(check_exp_formula(4, x0, theta));
        }
        out.push_back(worst_of(std::move(batch), "degrees=1..4"));
    }

    std::vector<double> bps = nc.breakpoints();
    for (std::size_t i = 0; i < cfg.verify.rhos.size(); ++i) {
        const double rho = cfg.verify.rhos[i];
        const std::string tag = std::string(family_name(s.family)) + "," + rho_tag(rho);
        if (!stable_at(s, rho)) {
            out.push_back(skipped("verify[" + tag + "]", "unstable load"));
            continue;
        }
        const SystemParams params = s.params_at(rho);
        const AlphaDecision a = solve_alpha_star(params, s.c1, s.c2);

        Xoshiro256 rng(derive_seed(cfg.base_seed, {0x0d1f, i}));
        std::vector<VerificationReport> deriv;
        const double h = 1e-4;
        while (deriv.size() < cfg.verify.random_points) {
            const double t = 2.0 * h + 20.0 * rng.uniform();
            const bool near = std::any_of(bps.begin(), bps.end(), [&](double b) { return std::abs(t - b) <= 2.0 * h; });
            if (!near) {
                deriv.push_back(check_r_derivative(nc, params.lambda1, t, h));
            }
        }
        out.push_back(worst_of(std::move(deriv), tag));

        if (!(params.lambda1 > 0.0)) {
            out.push_back(skipped("claim1[" + tag + "]", "no class-1 arrivals"));
        } else if (a.is_finite()) {
            out.push_back(tagged(check_claim1(params, nc, a.age()), tag));
            std::vector<VerificationReport> above;
            for (int k = 1; k <= 20; ++k) {
                above.push_back(check_claim1(params, nc, a.age() + 0.5 * k));
            }
            out.push_back(worst_of(std::move(above), tag));
        } else {
            out.push_back(skipped("claim1[" + tag + "]", "alpha* is " + a.case_name()));
        }

        if (!cfg.verify.simulation) {
            continue;
        }
        if (!(params.lambda1 > 0.0)) {
            out.push_back(skipped("simulation[" + tag + "]", "no class-1 arrivals"));
            continue;
        }
        SimOptions opts = cfg.verify.sim;
        opts.seed = replication_seed(cfg.base_seed, i, 0);
        opts.record_tails = true;
        opts.record_jobs = false;
        const SimResult res = simulate_overtake(params, a, s.c1, s.c2, opts);
        out.push_back(tagged(check_conservation(res, params), tag));
        const std::vector<double> q0_mult{0.5, 1.0, 2.0, 4.0};
        const std::vector<double> tail_mult{0.5, 1.0, 2.0};
        try {
            out.push_back(tagged(check_q0_tail(res, params, q0_mult, 3.0, TailError::BatchMeans), tag));
        } catch (const InsufficientSample& e) {
            out.push_back(skipped("q0_tail[" + tag + "]", e.what()));
        }
        if (a.is_finite()) {
            out.push_back(tagged(check_tail_beyond_alpha(res, params, a.age(), tail_mult), tag));
            try {
                out.push_back(tagged(check_amortized_fixed_point(res, params, s.c1, s.c2, a.age()), tag));
            } catch (const InsufficientSample& e) {
                out.push_back(skipped("amortized_fixed_point[" + tag + "]", e.what()));
            }
        }
    }

    if (cfg.verify.convexity) {
        if (stable_at(s, cfg.convexity.rho)) {
            out.push_back(run_convexity(cfg).report);
        } else {
            out.push_back(skipped("convexity[" + rho_tag(cfg.convexity.rho) + "]", "unstable load"));
        }
    }
    return out;
}

}  // namespace tvhc
