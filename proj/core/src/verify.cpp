#include "tvhc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tvhc/optimal.hpp"
#include "tvhc/parallel.hpp"
#include "tvhc/quadrature.hpp"
#include "tvhc/rng.hpp"
#include "tvhc/stats.hpp"

namespace tvhc {
namespace {

template <class... Args>
std::string cat(const Args&... args) {
    std::ostringstream os;
    os.precision(10);
    (os << ... << args);
    return os.str();
}

std::vector<double> shifted_breakpoints(const NetCost& nc, double origin, bool backward) {
    std::vector<double> out;
    auto bps = nc.breakpoints();
    bps.push_back(0.0);
    for (double b : bps) {
        const double s = backward ? origin - b : b - origin;
        if (s > 0.0) {
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace

VerificationReport make_report(std::string name, double statistic, double threshold, std::string detail) {
    VerificationReport r;
    r.check_name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    r.passed = statistic <= threshold;
    r.detail = std::move(detail);
    return r;
}

VerificationReport check_conservation(const SimResult& res, const SystemParams& params, double threshold) {
    if (res.t1_samples.empty() && res.t2_samples.empty()) {
        throw std::invalid_argument("check_conservation: empty result");
    }
    const double w = params.mean_work();
    const double m1 = res.t1_samples.empty() ? 0.0 : stats::mean(res.t1_samples);
    const double m2 = res.t2_samples.empty() ? 0.0 : stats::mean(res.t2_samples);
    const double lhs = params.rho1() * m1 + params.rho2() * m2;
    return make_report("conservation", std::abs(lhs - w) / w, threshold,
                       cat("rho1*E[T1]+rho2*E[T2]=", lhs, " W=", w));
}

AmortizedEstimate amortized_index(const SimResult& res, const HoldingCostFn& c1, double t, std::size_t min_samples) {
    std::vector<double> cost;
    std::vector<double> time;
    const double base = cumulative(c1, t);
    for (double s : res.t1_samples) {
        if (s >= t) {
            cost.push_back(cumulative(c1, s) - base);
            time.push_back(s - t);
        }
    }
    if (cost.size() < std::max<std::size_t>(min_samples, 40)) {
        throw InsufficientSample(cat("amortized_index: only ", cost.size(), " class-1 samples with T1 >= ", t));
    }
    AmortizedEstimate est;
    est.n = cost.size();
    const double mean_time = stats::mean(time);
    est.value = stats::mean(cost) / mean_time;
    std::vector<double> resid(cost.size());
    for (std::size_t i = 0; i < cost.size(); ++i) {
        resid[i] = cost[i] - est.value * time[i];
    }
    est.std_error = stats::batch_means_std_error(resid) / mean_time;
    return est;
}

VerificationReport check_amortized_fixed_point(const SimResult& res, const SystemParams& params,
                                               const HoldingCostFn& c1, double c2, double alpha, double threshold) {
    const AmortizedEstimate est = amortized_index(res, c1, alpha);
    const double target = params.mu2 * c2;
    const double gap = params.mu1 * est.value - target;
    const double se = params.mu1 * est.std_error;
    return make_report("amortized_fixed_point", std::abs(gap) / se, threshold,
                       cat("mu1*c1_eff(", alpha, ")=", params.mu1 * est.value, " mu2*c2=", target, " se=", se,
                           " n=", est.n));
}

Claim1Terms claim1_terms(const SystemParams& params, const NetCost& nc, double t1) {
    const AlphaDecision decision = solve_alpha_star(params, nc.c1, nc.c2);
    if (!decision.is_finite()) {
        throw std::invalid_argument("claim1_terms: alpha* is not finite for these parameters");
    }
    if (!(params.lambda1 > 0.0)) {
        throw std::invalid_argument("claim1_terms: needs lambda1 > 0");
    }
    const double a = decision.age();
    if (t1 < a) {
        throw std::invalid_argument("claim1_terms: t1 must be at least alpha*");
    }
    const double theta = params.lookahead_rate();
    const double l1 = params.lambda1;
    const auto r = [&](double t) { return bandit_r(nc, l1, t); };
    const auto forward = [&](double s) {
        return quad::expect_exponential([&](double x) { return r(s + x); }, theta,
                                        shifted_breakpoints(nc, s, false));
    };
    const double back = quad::expect_exponential([&](double x) { return r(a - x); }, l1,
                                                 shifted_breakpoints(nc, a, true));
    Claim1Terms out;
    out.alpha_star = a;
    out.lhs = params.mu1 * forward(t1);
    out.rhs = (params.mu1 - l1) * back + l1 * forward(a);
    return out;
}

VerificationReport check_claim1(const SystemParams& params, const NetCost& nc, double t1) {
    const Claim1Terms c = claim1_terms(params, nc, t1);
    const std::string detail = cat("t1=", t1, " alpha*=", c.alpha_star, " lhs=", c.lhs, " rhs=", c.rhs);
    if (t1 == c.alpha_star) {
        return make_report("claim1_equality", std::abs(c.lhs - c.rhs) / std::abs(c.lhs), 1e-6, detail);
    }
    return make_report("claim1_inequality", c.rhs - c.lhs, 1e-8, detail);
}

VerificationReport check_exp_formula(int degree, double x0, double theta, double threshold) {
    if (!(theta > 0.0)) {
        throw std::domain_error("check_exp_formula: theta must be positive");
    }
    if (degree < 1) {
        throw std::invalid_argument("check_exp_formula: degree must be at least 1");
    }
    double worst = 0.0;
    int worst_k = 0;
    for (int k = 1; k <= degree; ++k) {
        const auto f = [k](double x) { return std::pow(x, k); };
        const auto df = [k](double x) { return k * std::pow(x, k - 1); };
        const double fx = f(x0);
        const double fwd_lhs = quad::expect_exponential([&](double s) { return f(x0 + s); }, theta) - fx;
        const double fwd_rhs = quad::expect_exponential([&](double s) { return df(x0 + s); }, theta) / theta;
        const double bwd_lhs = fx - quad::expect_exponential([&](double s) { return f(x0 - s); }, theta);
        const double bwd_rhs = quad::expect_exponential([&](double s) { return df(x0 - s); }, theta) / theta;
        for (auto [lhs, rhs] : {std::pair{fwd_lhs, fwd_rhs}, std::pair{bwd_lhs, bwd_rhs}}) {
            const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
            const double rel = std::abs(lhs - rhs) / scale;
            if (rel > worst) {
                worst = rel;
                worst_k = k;
            }
        }
    }
    return make_report("exp_formula", worst, threshold,
                       cat("degree<=", degree, " x0=", x0, " theta=", theta, " worst k=", worst_k));
}

VerificationReport check_r_derivative(const NetCost& nc, double lambda1, double t, double h, double threshold) {
    const double exact = nc.derivative(t) + lambda1 * nc(t);
    const double resid = r_derivative_residual(nc, lambda1, t, h);
    return make_report("r_derivative", resid / std::max(1.0, std::abs(exact)), threshold,
                       cat("t=", t, " lambda1=", lambda1, " r'=", exact, " residual=", resid));
}

VerificationReport check_q0_tail(const SimResult& res, const SystemParams& params,
                                 std::span<const double> multipliers, double threshold, TailError error) {
    if (res.q0_sojourns.empty()) {
        throw InsufficientSample("check_q0_tail: no Q0 sojourns recorded");
    }
    const std::size_t n = res.q0_sojourns.size();
    if (error == TailError::BatchMeans && n < 40) {
        throw InsufficientSample(cat("check_q0_tail: only ", n, " Q0 sojourns recorded"));
    }
    const double theta = params.lookahead_rate();
    std::vector<double> ts;
    for (double m : multipliers) {
        ts.push_back(m / theta);
    }
    const auto emp = empirical_tail(res.q0_sojourns, ts);
    double worst = 0.0;
    std::ostringstream os;
    os << "n=" << n << " error=" << (error == TailError::Binomial ? "binomial" : "batch_means");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double p = std::exp(-theta * ts[i]);
        const double diff = std::abs(emp[i] - p);
        const double z_bin = diff / stats::binomial_std_error(p, n);
        // Sojourns within one Q0 busy period are correlated, so the binomial
        // error understates the spread; both z values are reported.
        std::vector<double> ind(n);
        for (std::size_t k = 0; k < n; ++k) {
            ind[k] = res.q0_sojourns[k] > ts[i] ? 1.0 : 0.0;
        }
        const double z_bm = n >= 40 ? diff / stats::batch_means_std_error(ind) : NAN;
        worst = std::max(worst, error == TailError::Binomial ? z_bin : z_bm);
        os << " t=" << ts[i] << ":emp=" << emp[i] << ",exact=" << p << ",z_binomial=" << z_bin
           << ",z_batch_means=" << z_bm;
    }
    return make_report("q0_tail", worst, threshold, os.str());
}

VerificationReport check_tail_beyond_alpha(const SimResult& res, const SystemParams& params, double alpha,
                                           std::span<const double> multipliers, double threshold) {
    const std::size_t n = res.t1_samples.size();
    std::size_t above = 0;
    for (double t : res.t1_samples) {
        above += t > alpha ? 1 : 0;
    }
    if (above < 40) {
        throw InsufficientSample(cat("check_tail_beyond_alpha: only ", above, " class-1 response times exceed alpha"));
    }
    const double theta = params.lookahead_rate();
    const double p_alpha = static_cast<double>(above) / static_cast<double>(n);
    double worst = 0.0;
    std::ostringstream os;
    os << "n=" << above;
    std::vector<double> resid(n);
    for (double m : multipliers) {
        const double t = alpha + m / theta;
        std::size_t beyond = 0;
        for (double s : res.t1_samples) {
            beyond += s > t ? 1 : 0;
        }
        const double ratio = static_cast<double>(beyond) / static_cast<double>(above);
        // Ratio of means; residuals 1{T>t} - ratio 1{T>alpha} in departure order.
        for (std::size_t i = 0; i < n; ++i) {
            const double s = res.t1_samples[i];
            resid[i] = (s > t ? 1.0 : 0.0) - ratio * (s > alpha ? 1.0 : 0.0);
        }
        const double se = stats::batch_means_std_error(resid) / p_alpha;
        const double exact = std::exp(-m);
        const double z = std::abs(ratio - exact) / se;
        const double z_binomial = std::abs(ratio - exact) / stats::binomial_std_error(exact, above);
        worst = std::max(worst, z);
        os << " t-alpha=" << m / theta << ":emp=" << ratio << ",exact=" << exact << ",z=" << z
           << ",z_binomial=" << z_binomial;
    }
    return make_report("tail_beyond_alpha", worst, threshold, os.str());
}

VerificationReport check_tail_below_alpha(const SimResult& overtake, const SimResult& prio21, double alpha,
                                          std::span<const double> ts, double threshold) {
    for (double t : ts) {
        if (t > alpha) {
            throw std::invalid_argument("check_tail_below_alpha: ages must not exceed alpha");
        }
    }
    const auto a = empirical_tail(overtake.t1_samples, ts);
    const auto b = empirical_tail(prio21.t1_samples, ts);
    const double na = static_cast<double>(overtake.t1_samples.size());
    const double nb = static_cast<double>(prio21.t1_samples.size());
    double worst = 0.0;
    std::ostringstream os;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double se = std::sqrt(a[i] * (1.0 - a[i]) / na + b[i] * (1.0 - b[i]) / nb);
        const double z = se > 0.0 ? std::abs(a[i] - b[i]) / se : (a[i] == b[i] ? 0.0 : INFINITY);
        worst = std::max(worst, z);
        os << " t=" << ts[i] << ":overtake=" << a[i] << ",prio21=" << b[i] << ",z=" << z;
    }
    return make_report("tail_below_alpha", worst, threshold, os.str());
}

ConvexityResult convexity_sweep(const SystemParams& params, const HoldingCostFn& c1, double c2,
                                std::span<const double> alphas, const SimOptions& opts, std::size_t replications,
                                std::uint64_t base_seed, unsigned workers) {
    if (alphas.empty() || replications < 2) {
        throw std::invalid_argument("convexity_sweep: need a grid and at least two replications");
    }
    ConvexityResult out;
    out.alphas.assign(alphas.begin(), alphas.end());
    for (std::size_t r = 0; r < replications; ++r) {
        out.seeds.push_back(derive_seed(base_seed, {r}));
    }
    const std::size_t n = alphas.size();
    const auto flat = parallel_map(n * replications, workers, [&](std::size_t job) {
        SimOptions o = opts;
        o.seed = out.seeds[job % replications];
        const SimResult res = simulate_overtake(params, AlphaDecision::finite(alphas[job / replications]), c1, c2, o);
        return time_avg_cost(res, c1, c2);
    });
    out.costs.assign(n, std::vector<double>(replications));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < replications; ++r) {
            out.costs[i][r] = flat[i * replications + r];
        }
        out.means.push_back(stats::mean(out.costs[i]));
        out.two_sigma.push_back(2.0 * stats::std_error(out.costs[i]));
    }
    out.argmin = static_cast<std::size_t>(std::min_element(out.means.begin(), out.means.end()) - out.means.begin());

    const auto significant_drop = [&](std::size_t from, std::size_t to) {
        // Moving from `from` (closer to argmin) to `to`, the cost should not fall.
        std::vector<double> d(replications);
        for (std::size_t r = 0; r < replications; ++r) {
            d[r] = out.costs[to][r] - out.costs[from][r];
        }
        return stats::mean(d) < -2.0 * stats::std_error(d);
    };
    for (std::size_t i = out.argmin; i-- > 0;) {
        out.violations += significant_drop(i + 1, i) ? 1 : 0;
    }
    for (std::size_t i = out.argmin + 1; i < n; ++i) {
        out.violations += significant_drop(i - 1, i) ? 1 : 0;
    }
    return out;
}

VerificationReport check_convexity(const ConvexityResult& sweep, double alpha_star) {
    const auto& a = sweep.alphas;
    const std::size_t hi = static_cast<std::size_t>(std::lower_bound(a.begin(), a.end(), alpha_star) - a.begin());
    const std::size_t lo = hi == 0 ? 0 : hi - 1;
    std::vector<std::size_t> neighbours{lo};
    if (hi < a.size()) {
        neighbours.push_back(hi);
    }
    // A grid that does not bracket alpha* cannot locate the optimum.
    const bool spans = !a.empty() && a.front() <= alpha_star && alpha_star <= a.back();
    bool adjacent = spans && std::find(neighbours.begin(), neighbours.end(), sweep.argmin) != neighbours.end();
    if (spans && !adjacent) {
        // Statistically tied with a neighbour of alpha* counts as adjacent.
        const std::size_t reps = sweep.costs[sweep.argmin].size();
        for (std::size_t k : neighbours) {
            std::vector<double> d(reps);
            for (std::size_t r = 0; r < reps; ++r) {
                d[r] = sweep.costs[k][r] - sweep.costs[sweep.argmin][r];
            }
            adjacent = adjacent || stats::mean(d) <= 2.0 * stats::std_error(d);
        }
    }
    std::ostringstream os;
    os.precision(8);
    os << "alpha*=" << alpha_star << " argmin=" << a[sweep.argmin] << " violations=" << sweep.violations
       << " adjacent=" << (adjacent ? "yes" : "no") << (spans ? "" : " (grid does not span alpha*)") << " means=[";
    for (std::size_t i = 0; i < a.size(); ++i) {
        os << (i ? " " : "") << a[i] << ":" << sweep.means[i];
    }
    os << "]";
    return make_report("convexity", static_cast<double>(sweep.violations + (adjacent ? 0 : 1)), 0.0, os.str());
}

VerificationReport check_convexity(const SystemParams& params, const HoldingCostFn& c1, double c2,
                                   std::span<const double> alphas, const SimOptions& opts, std::size_t replications,
                                   std::uint64_t base_seed, unsigned workers) {
    if (alphas.size() < 7 || !std::is_sorted(alphas.begin(), alphas.end())) {
        throw std::invalid_argument("check_convexity: grid must be sorted with at least 7 points");
    }
    const AlphaDecision star = solve_alpha_star(params, c1, c2);
    if (!(alphas.front() <= star.age() && star.age() <= alphas.back())) {
        throw std::invalid_argument("check_convexity: grid does not span alpha*");
    }
    return check_convexity(convexity_sweep(params, c1, c2, alphas, opts, replications, base_seed, workers),
                           star.age());
}

}  // namespace tvhc
