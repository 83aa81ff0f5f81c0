#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace tvhc {

/// Overtake age of an Overtake policy: class-1 jobs of age >= alpha preempt
/// class 2. Zero is strict priority to class 1, Infinite strict priority to
/// class 2.
class AlphaDecision {
public:
    enum class Case { Zero, Finite, Infinite };

    static AlphaDecision zero() { return AlphaDecision(Case::Zero, 0.0); }
    static AlphaDecision infinite() {
        return AlphaDecision(Case::Infinite, std::numeric_limits<double>::infinity());
    }
    /// Ages <= 0 collapse to Zero and +inf to Infinite.
    static AlphaDecision finite(double alpha) {
        if (alpha != alpha) {
            throw std::invalid_argument("overtake age is NaN");
        }
        if (alpha <= 0.0) {
            return zero();
        }
        if (alpha == std::numeric_limits<double>::infinity()) {
            return infinite();
        }
        return AlphaDecision(Case::Finite, alpha);
    }

    Case kind() const noexcept { return case_; }
    bool is_zero() const noexcept { return case_ == Case::Zero; }
    bool is_finite() const noexcept { return case_ == Case::Finite; }
    bool is_infinite() const noexcept { return case_ == Case::Infinite; }

    /// 0, alpha or +inf.
    double age() const noexcept { return alpha_; }

    std::string case_name() const {
        switch (case_) {
            case Case::Zero: return "zero";
            case Case::Finite: return "finite";
            case Case::Infinite: return "infinite";
        }
        return "?";
    }

    friend bool operator==(const AlphaDecision&, const AlphaDecision&) = default;

private:
    AlphaDecision(Case c, double a) : case_(c), alpha_(a) {}
    Case case_;
    double alpha_;
};

}  // namespace tvhc
