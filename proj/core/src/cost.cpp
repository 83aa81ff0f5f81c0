#include "tvhc/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tvhc/quadrature.hpp"

namespace tvhc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw InvalidCost(std::string(what) + " must be finite");
    }
}

void require_age(double t, const char* fn) {
    if (!(t >= 0.0)) {
        throw std::domain_error(std::string(fn) + ": age must be non-negative");
    }
}

double horner(const std::vector<double>& a, double t) {
    double acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        acc = acc * t + *it;
    }
    return acc;
}

std::vector<double> differentiate(const std::vector<double>& a) {
    if (a.size() <= 1) {
        return {0.0};
    }
    std::vector<double> d(a.size() - 1);
    for (std::size_t k = 1; k < a.size(); ++k) {
        d[k - 1] = static_cast<double>(k) * a[k];
    }
    return d;
}

double pwl_last_slope(const std::vector<Knot>& k) {
    if (k.size() < 2) {
        return 0.0;
    }
    const Knot& a = k[k.size() - 2];
    const Knot& b = k.back();
    return (b.rate - a.rate) / (b.t - a.t);
}

double pwl_eval(const std::vector<Knot>& k, double t) {
    if (t <= k.front().t) {
        return k.front().rate;
    }
    if (t >= k.back().t) {
        return k.back().rate + pwl_last_slope(k) * (t - k.back().t);
    }
    auto hi = std::upper_bound(k.begin(), k.end(), t, [](double x, const Knot& n) { return x < n.t; });
    auto lo = hi - 1;
    const double w = (t - lo->t) / (hi->t - lo->t);
    return lo->rate + w * (hi->rate - lo->rate);
}

double pwl_cumulative(const std::vector<Knot>& k, double t) {
    if (t <= k.front().t) {
        return k.front().rate * t;
    }
    double acc = k.front().rate * k.front().t;
    for (std::size_t i = 1; i < k.size(); ++i) {
        const double a = k[i - 1].t;
        const double b = std::min(k[i].t, t);
        acc += 0.5 * (k[i - 1].rate + pwl_eval(k, b)) * (b - a);
        if (t <= k[i].t) {
            return acc;
        }
    }
    const double tail = t - k.back().t;
    return acc + k.back().rate * tail + 0.5 * pwl_last_slope(k) * tail * tail;
}

void validate_polynomial(PolynomialCost& p) {
    if (p.coeffs.empty()) {
        throw InvalidCost("polynomial cost needs at least one coefficient");
    }
    for (double a : p.coeffs) {
        require_finite(a, "polynomial coefficient");
    }
    while (p.coeffs.size() > 1 && p.coeffs.back() == 0.0) {
        p.coeffs.pop_back();
    }
    if (p.coeffs.front() < 0.0) {
        throw InvalidCost("polynomial cost is negative at age 0");
    }
    if (p.coeffs.size() == 1) {
        return;
    }
    if (p.coeffs.back() < 0.0) {
        throw InvalidCost("polynomial cost with negative leading coefficient is eventually decreasing");
    }
    // Past the Cauchy root bound of p' the sign of p' is that of its leading
    // coefficient, so scanning [0, bound] is enough.
    const auto dp = differentiate(p.coeffs);
    double bound = 1.0;
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < dp.size(); ++i) {
        bound = std::max(bound, 1.0 + std::abs(dp[i] / dp.back()));
    }
    for (double a : dp) {
        scale = std::max(scale, std::abs(a));
    }
    constexpr int kSteps = 4096;
    for (int i = 0; i <= kSteps; ++i) {
        const double t = bound * static_cast<double>(i) / kSteps;
        const double mag = scale * std::max(1.0, std::pow(t, static_cast<double>(dp.size() - 1)));
        if (horner(dp, t) < -1e-12 * mag) {
            std::ostringstream os;
            os << "polynomial cost decreases near age " << t;
            throw InvalidCost(os.str());
        }
    }
}

void validate_pwl(const PiecewiseLinearCost& p) {
    if (p.knots.empty()) {
        throw InvalidCost("piecewise linear cost needs at least one knot");
    }
    for (const Knot& k : p.knots) {
        require_finite(k.t, "knot time");
        require_finite(k.rate, "knot rate");
    }
    if (p.knots.front().t < 0.0) {
        throw InvalidCost("knot times must be non-negative");
    }
    if (p.knots.front().rate < 0.0) {
        throw InvalidCost("piecewise linear cost is negative at age 0");
    }
    for (std::size_t i = 1; i < p.knots.size(); ++i) {
        if (!(p.knots[i].t > p.knots[i - 1].t)) {
            throw InvalidCost("knot times must be strictly increasing");
        }
        if (p.knots[i].rate < p.knots[i - 1].rate) {
            throw InvalidCost("piecewise linear cost must be non-decreasing");
        }
    }
}

}  // namespace

HoldingCostFn::HoldingCostFn(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const ConstantCost& c) {
                       require_finite(c.c, "constant cost");
                       if (c.c < 0.0) {
                           throw InvalidCost("constant cost must be non-negative");
                       }
                   },
                   [](PolynomialCost& p) { validate_polynomial(p); },
                   [this](const DeadlineCost& d) {
                       require_finite(d.c_after, "deadline cost");
                       require_finite(d.d, "deadline");
                       if (d.c_after < 0.0 || d.d < 0.0) {
                           throw InvalidCost("deadline cost and deadline must be non-negative");
                       }
                       if (d.d > 0.0 && d.c_after > 0.0) {
                           breaks_.push_back(d.d);
                       }
                   },
                   [this](const PiecewiseLinearCost& p) {
                       validate_pwl(p);
                       for (const Knot& k : p.knots) {
                           if (k.t > 0.0) {
                               breaks_.push_back(k.t);
                           }
                       }
                   },
               },
               v_);
}

HoldingCostFn HoldingCostFn::constant(double c) { return HoldingCostFn(ConstantCost{c}); }

HoldingCostFn HoldingCostFn::polynomial(std::vector<double> coeffs) {
    return HoldingCostFn(PolynomialCost{std::move(coeffs)});
}

HoldingCostFn HoldingCostFn::deadline(double c_after, double d) {
    return HoldingCostFn(DeadlineCost{c_after, d});
}

HoldingCostFn HoldingCostFn::piecewise_linear(std::vector<Knot> knots) {
    return HoldingCostFn(PiecewiseLinearCost{std::move(knots)});
}

double HoldingCostFn::limit() const {
    return std::visit(overloaded{
                          [](const ConstantCost& c) { return c.c; },
                          [](const PolynomialCost& p) { return p.coeffs.size() > 1 ? kInf : p.coeffs[0]; },
                          [](const DeadlineCost& d) { return d.c_after; },
                          [](const PiecewiseLinearCost& p) {
                              return pwl_last_slope(p.knots) > 0.0 ? kInf : p.knots.back().rate;
                          },
                      },
                      v_);
}

std::size_t HoldingCostFn::degree() const {
    if (const auto* p = std::get_if<PolynomialCost>(&v_)) {
        return p->coeffs.size() - 1;
    }
    return 0;
}

std::string HoldingCostFn::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const ConstantCost& c) { os << "constant(" << c.c << ")"; },
                   [&](const PolynomialCost& p) {
                       os << "polynomial(";
                       for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
                           os << (i ? "," : "") << p.coeffs[i];
                       }
                       os << ")";
                   },
                   [&](const DeadlineCost& d) { os << "deadline(c=" << d.c_after << ",d=" << d.d << ")"; },
                   [&](const PiecewiseLinearCost& p) {
                       os << "piecewise_linear(";
                       for (std::size_t i = 0; i < p.knots.size(); ++i) {
                           os << (i ? "," : "") << "(" << p.knots[i].t << "," << p.knots[i].rate << ")";
                       }
                       os << ")";
                   },
               },
               v_);
    return os.str();
}

double eval(const HoldingCostFn& f, double t) {
    require_age(t, "eval");
    return std::visit(overloaded{
                          [](const ConstantCost& c) { return c.c; },
                          [t](const PolynomialCost& p) { return horner(p.coeffs, t); },
                          [t](const DeadlineCost& d) { return t >= d.d ? d.c_after : 0.0; },
                          [t](const PiecewiseLinearCost& p) { return pwl_eval(p.knots, t); },
                      },
                      f.variant());
}

double cumulative(const HoldingCostFn& f, double t) {
    require_age(t, "cumulative");
    return std::visit(overloaded{
                          [t](const ConstantCost& c) { return c.c * t; },
                          [t](const PolynomialCost& p) {
                              double acc = 0.0;
                              for (std::size_t k = p.coeffs.size(); k-- > 0;) {
                                  acc = acc * t + p.coeffs[k] / static_cast<double>(k + 1);
                              }
                              return acc * t;
                          },
                          [t](const DeadlineCost& d) { return d.c_after * std::max(0.0, t - d.d); },
                          [t](const PiecewiseLinearCost& p) { return pwl_cumulative(p.knots, t); },
                      },
                      f.variant());
}

double derivative(const HoldingCostFn& f, double t) {
    require_age(t, "derivative");
    const auto& b = f.breakpoints();
    if (std::binary_search(b.begin(), b.end(), t)) {
        throw std::domain_error("derivative: cost is not differentiable at this age");
    }
    return std::visit(overloaded{
                          [](const ConstantCost&) { return 0.0; },
                          [t](const PolynomialCost& p) { return horner(differentiate(p.coeffs), t); },
                          [](const DeadlineCost&) { return 0.0; },
                          [t](const PiecewiseLinearCost& p) {
                              const auto& k = p.knots;
                              if (t < k.front().t) {
                                  return 0.0;
                              }
                              if (t > k.back().t) {
                                  return pwl_last_slope(k);
                              }
                              auto hi = std::upper_bound(k.begin(), k.end(), t,
                                                         [](double x, const Knot& n) { return x < n.t; });
                              auto lo = hi - 1;
                              return (hi->rate - lo->rate) / (hi->t - lo->t);
                          },
                      },
                      f.variant());
}

double exp_shift_mean_quadrature(const HoldingCostFn& f, double t, double theta) {
    require_age(t, "exp_shift_mean");
    if (!(theta > 0.0)) {
        throw std::domain_error("exp_shift_mean: theta must be positive");
    }
    std::vector<double> shifted;
    for (double b : f.breakpoints()) {
        if (b > t) {
            shifted.push_back(b - t);
        }
    }
    return quad::expect_exponential([&](double s) { return eval(f, t + s); }, theta, std::move(shifted));
}

double exp_shift_mean(const HoldingCostFn& f, double t, double theta) {
    require_age(t, "exp_shift_mean");
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::domain_error("exp_shift_mean: theta must be positive");
    }
    return std::visit(overloaded{
                          [](const ConstantCost& c) { return c.c; },
                          [&](const PolynomialCost& p) {
                              if (p.coeffs.size() - 1 > kMaxClosedFormDegree) {
                                  return exp_shift_mean_quadrature(f, t, theta);
                              }
                              // E[p(t+X)] = sum_k p^(k)(t) E[X^k] / k! = sum_k p^(k)(t) / theta^k
                              double acc = 0.0;
                              double scale = 1.0;
                              std::vector<double> d = p.coeffs;
                              for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
                                  acc += horner(d, t) * scale;
                                  d = differentiate(d);
                                  scale /= theta;
                              }
                              return acc;
                          },
                          [&](const DeadlineCost& d) {
                              return t >= d.d ? d.c_after : d.c_after * std::exp(-theta * (d.d - t));
                          },
                          [&](const PiecewiseLinearCost&) { return exp_shift_mean_quadrature(f, t, theta); },
                      },
                      f.variant());
}

double NetCost::operator()(double t) const {
    return mu1 * eval(c1, std::max(t, 0.0)) - mu2 * c2;
}

double NetCost::integral(double t) const {
    if (t < 0.0) {
        return t * (*this)(0.0);
    }
    return mu1 * cumulative(c1, t) - mu2 * c2 * t;
}

double NetCost::derivative(double t) const {
    if (t < 0.0) {
        return 0.0;
    }
    const auto b = breakpoints();
    if (std::binary_search(b.begin(), b.end(), t)) {
        throw std::domain_error("NetCost::derivative: not differentiable at this age");
    }
    return mu1 * tvhc::derivative(c1, t);
}

std::vector<double> NetCost::breakpoints() const {
    std::vector<double> b;
    if (tvhc::derivative(c1, 0.0) != 0.0) {
        b.push_back(0.0);
    }
    for (double x : c1.breakpoints()) {
        b.push_back(x);
    }
    return b;
}

double exp_shift_mean(const NetCost& nc, double t, double theta) {
    if (t >= 0.0) {
        return nc.mu1 * exp_shift_mean(nc.c1, t, theta) - nc.mu2 * nc.c2;
    }
    // Memorylessness: X either stays below -t (cost frozen at c(0)) or
    // overshoots 0 by a fresh Exp(theta) amount.
    const double p_over = std::exp(theta * t);
    return (1.0 - p_over) * nc(0.0) + p_over * exp_shift_mean(nc, 0.0, theta);
}

double bandit_r(const NetCost& nc, double lambda1, double t1) {
    return nc(t1) + lambda1 * nc.integral(t1);
}

double r_derivative_residual(const NetCost& nc, double lambda1, double t, double h) {
    if (!(h > 0.0)) {
        throw std::domain_error("r_derivative_residual: step must be positive");
    }
    for (double b : nc.breakpoints()) {
        if (b >= t - h && b <= t + h) {
            throw std::domain_error("r_derivative_residual: stencil straddles a breakpoint of the cost");
        }
    }
    const double fd = (bandit_r(nc, lambda1, t + h) - bandit_r(nc, lambda1, t - h)) / (2.0 * h);
    const double exact = nc.derivative(t) + lambda1 * nc(t);
    return std::abs(fd - exact);
}

}  // namespace tvhc
