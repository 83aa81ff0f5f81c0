#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tvhc {

/// Cost rate that does not depend on age.
struct ConstantCost {
    double c = 0.0;
};

/// c(t) = coeffs[0] + coeffs[1] t + coeffs[2] t^2 + ...
struct PolynomialCost {
    std::vector<double> coeffs;
};

/// Step cost: zero before the deadline d, c_after from d on.
struct DeadlineCost {
    double c_after = 0.0;
    double d = 0.0;
};

struct Knot {
    double t = 0.0;
    double rate = 0.0;
};

/// Linear interpolation between knots. Constant at the first knot's rate
/// before the first knot; continues with the last segment's slope after the
/// last knot.
struct PiecewiseLinearCost {
    std::vector<Knot> knots;
};

/// Thrown when a cost function violates its invariants.
class InvalidCost : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when adaptive quadrature does not reach its tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-decreasing, non-negative instantaneous holding cost as a function of
/// job age. Construction validates the invariants, so every instance is a
/// legal class-1 holding cost.
class HoldingCostFn {
public:
    using Variant = std::variant<ConstantCost, PolynomialCost, DeadlineCost, PiecewiseLinearCost>;

    explicit HoldingCostFn(Variant v);

    static HoldingCostFn constant(double c);
    static HoldingCostFn polynomial(std::vector<double> coeffs);
    static HoldingCostFn deadline(double c_after, double d);
    static HoldingCostFn piecewise_linear(std::vector<Knot> knots);

    const Variant& variant() const noexcept { return v_; }

    /// Ages where the function is not smooth (jumps or kinks), ascending.
    const std::vector<double>& breakpoints() const noexcept { return breaks_; }

    /// lim_{t -> inf} c(t); +inf when unbounded.
    double limit() const;

    /// Polynomial degree after trimming trailing zeros; 0 for other variants.
    std::size_t degree() const;

    std::string describe() const;

private:
    Variant v_;
    std::vector<double> breaks_;
};

/// Largest polynomial degree handled by the exponential-moment closed form.
inline constexpr std::size_t kMaxClosedFormDegree = 4;

double eval(const HoldingCostFn& f, double t);

/// Integral of f over [0, t].
double cumulative(const HoldingCostFn& f, double t);

/// f'(t) on a smooth piece. Throws std::domain_error at a jump or kink.
double derivative(const HoldingCostFn& f, double t);

/// E[f(t + X)] with X ~ Exp(theta).
double exp_shift_mean(const HoldingCostFn& f, double t, double theta);

/// Same expectation evaluated by exponential-weighted adaptive quadrature
/// regardless of variant. Used for cross-checking the closed forms.
double exp_shift_mean_quadrature(const HoldingCostFn& f, double t, double theta);

/// Net class-1 cost c(t) = mu1 c1(t) - mu2 c2 of the bandit reformulation.
/// Defined on the whole real line: for t < 0 the cost holds its value at 0.
struct NetCost {
    HoldingCostFn c1;
    double c2 = 0.0;
    double mu1 = 1.0;
    double mu2 = 1.0;

    double operator()(double t) const;

    /// Signed integral of c over [0, t]; equals t * c(0) for t < 0.
    double integral(double t) const;

    /// c'(t); zero for t < 0. Throws std::domain_error at breakpoints.
    double derivative(double t) const;

    /// Breakpoints of c on the real line (0 and those of c1).
    std::vector<double> breakpoints() const;
};

/// E[c(t + X)] with X ~ Exp(theta) for the net cost.
double exp_shift_mean(const NetCost& nc, double t, double theta);

/// Bandit cost rate r(t1) = c(t1) + lambda1 * integral_0^t1 c(s) ds: the net
/// cost of the oldest class-1 job plus the expected net cost of the
/// Poisson(lambda1) younger class-1 jobs behind it.
double bandit_r(const NetCost& nc, double lambda1, double t1);

/// |central difference of bandit_r at step h - (c'(t) + lambda1 c(t))|.
/// Throws std::domain_error when [t - h, t + h] straddles a breakpoint.
double r_derivative_residual(const NetCost& nc, double lambda1, double t, double h);

}  // namespace tvhc
