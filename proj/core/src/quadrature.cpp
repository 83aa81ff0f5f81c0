#include "tvhc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tvhc/cost.hpp"

namespace tvhc::quad {
namespace {

constexpr int kMaxSplits = 400;
// Relative goal of the adaptive loop, an order below the default tolerance.
constexpr double kGoal = 1e-13;
constexpr double kChunkWidth = 40.0;
constexpr int kMaxTailChunks = 16;

struct Piece {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

struct Interval {
    double a = 0.0;
    double b = 0.0;
    Piece p;
    bool operator<(const Interval& o) const { return p.error < o.p.error; }
};

Interval rule(const std::function<double(double)>& g, double a, double b) {
    Interval iv{a, b, {}};
    iv.p.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 0, 0.0, &iv.p.error,
                                                                               &iv.p.l1);
    return iv;
}

// Globally adaptive: always bisect the interval with the largest error
// estimate. Bisecting locally to a fixed relative goal chases roundoff on
// smooth integrands and sums it over every leaf.
Piece gk(const std::function<double(double)>& g, double a, double b) {
    Piece total;
    if (!(b > a)) {
        return total;
    }
    std::priority_queue<Interval> heap;
    heap.push(rule(g, a, b));
    total = heap.top().p;
    for (int split = 0; split < kMaxSplits && total.error > kGoal * total.l1; ++split) {
        const Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        const Interval left = rule(g, worst.a, mid);
        const Interval right = rule(g, mid, worst.b);
        total.value += left.p.value + right.p.value - worst.p.value;
        total.error += left.p.error + right.p.error - worst.p.error;
        total.l1 += left.p.l1 + right.p.l1 - worst.p.l1;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to drop the cancellation of the running updates.
    total = {};
    for (; !heap.empty(); heap.pop()) {
        total.value += heap.top().p.value;
        total.error += heap.top().p.error;
        total.l1 += heap.top().p.l1;
    }
    return total;
}

void check(const Piece& total, Tolerance tol, const char* what) {
    if (!std::isfinite(total.value)) {
        throw QuadratureError(std::string(what) + ": non-finite integral");
    }
    const double allowed = std::max(tol.abs, tol.rel * total.l1);
    if (total.error > allowed) {
        std::ostringstream os;
        os << what << ": error estimate " << total.error << " exceeds " << allowed;
        throw QuadratureError(os.str());
    }
}

}  // namespace

double integrate(const std::function<double(double)>& g, double a, double b, Tolerance tol) {
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw std::invalid_argument("integrate: bounds must be finite");
    }
    if (a == b) {
        return 0.0;
    }
    const double sign = a < b ? 1.0 : -1.0;
    const Piece p = gk(g, std::min(a, b), std::max(a, b));
    check(p, tol, "integrate");
    return sign * p.value;
}

double expect_exponential(const std::function<double(double)>& g, double theta,
                          std::vector<double> breakpoints, Tolerance tol) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("expect_exponential: theta must be positive and finite");
    }
    std::erase_if(breakpoints, [](double b) { return !(b > 0.0) || !std::isfinite(b); });
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    const auto weighted = [&](double s) {
        const double w = theta * std::exp(-theta * s);
        return w == 0.0 ? 0.0 : g(s) * w;
    };

    const double width = kChunkWidth / theta;
    const double body_end = (breakpoints.empty() ? 0.0 : breakpoints.back()) + width;

    Piece total;
    double lo = 0.0;
    auto accumulate = [&](double hi) {
        const Piece p = gk(weighted, lo, hi);
        total.value += p.value;
        total.error += p.error;
        total.l1 += p.l1;
        lo = hi;
        return p;
    };
    for (double b : breakpoints) {
        accumulate(b);
    }
    accumulate(body_end);
    for (int k = 0; k < kMaxTailChunks; ++k) {
        const Piece p = accumulate(lo + width);
        if (std::abs(p.value) <= 1e-17 * std::abs(total.value) || p.l1 == 0.0) {
            break;
        }
        if (k + 1 == kMaxTailChunks) {
            throw QuadratureError("expect_exponential: tail does not decay");
        }
    }
    check(total, tol, "expect_exponential");
    return total.value;
}

}  // namespace tvhc::quad
