#include "tvhc/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "tvhc/format.hpp"
#include "tvhc/rng.hpp"

namespace tvhc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Discipline { Overtake, Fcfs };
enum class Serving { None, Class1, Class2 };
enum class Event { Departure, Arrival1, Arrival2, Promotion };

// Stream ids folded into the run seed.
enum Stream : std::uint64_t { kGap1 = 1, kGap2 = 2, kSize1 = 3, kSize2 = 4 };

struct Job {
    double arrival = 0.0;
    double remaining = 0.0;
    double promotion = kInf;
};

class Engine {
public:
    Engine(const SystemParams& params, Discipline discipline, double alpha, const HoldingCostFn& c1, double c2,
           const SimOptions& opts)
        : params_(params),
          discipline_(discipline),
          alpha_(alpha),
          c1_(c1),
          c2_(c2),
          opts_(opts),
          gap1_(derive_seed(opts.seed, {kGap1})),
          gap2_(derive_seed(opts.seed, {kGap2})),
          size1_(derive_seed(opts.seed, {kSize1})),
          size2_(derive_seed(opts.seed, {kSize2})) {}

    SimResult run() {
        const auto expected = static_cast<std::size_t>(opts_.horizon_events - opts_.warmup_events);
        res_.t1_samples.reserve(expected);
        res_.seed = opts_.seed;
        res_.overtake_age = discipline_ == Discipline::Fcfs ? std::numeric_limits<double>::quiet_NaN() : alpha_;

        next1_ = params_.lambda1 > 0.0 ? gap1_.exponential(params_.lambda1) : kInf;
        next2_ = params_.lambda2 > 0.0 ? gap2_.exponential(params_.lambda2) : kInf;
        recording_ = opts_.warmup_events == 0;

        while (res_.counts.departures < opts_.horizon_events) {
            step();
        }
        res_.horizon = now_ - window_start_;
        return std::move(res_);
    }

private:
    Job& served() { return serving_ == Serving::Class1 ? q1_.front() : q2_.front(); }

    void step() {
        double t = serving_ == Serving::None ? kInf : now_ + served().remaining;
        Event ev = Event::Departure;
        if (next1_ < t) {
            t = next1_;
            ev = Event::Arrival1;
        }
        if (next2_ < t) {
            t = next2_;
            ev = Event::Arrival2;
        }
        const double t_prom = promoted_ < q1_.size() ? q1_[promoted_].arrival + alpha_ : kInf;
        if (t_prom < t) {
            t = t_prom;
            ev = Event::Promotion;
        }

        const double dt = t - now_;
        if (serving_ != Serving::None) {
            served().remaining -= dt;
            if (recording_) {
                res_.busy_time += dt;
            }
        }
        now_ = t;

        bool departed = false;
        switch (ev) {
            case Event::Departure:
                depart();
                departed = true;
                break;
            case Event::Arrival1:
                q1_.push_back({now_, size1_.exponential(params_.mu1)});
                ++res_.counts.arrivals1;
                next1_ = now_ + gap1_.exponential(params_.lambda1);
                break;
            case Event::Arrival2:
                q2_.push_back({now_, size2_.exponential(params_.mu2)});
                ++res_.counts.arrivals2;
                next2_ = now_ + gap2_.exponential(params_.lambda2);
                break;
            case Event::Promotion:
                assert(promoted_ == 0 || q1_[promoted_ - 1].promotion <= now_);
                q1_[promoted_].promotion = now_;
                ++promoted_;
                ++res_.counts.promotions;
                break;
        }
        reschedule(departed);
    }

    void depart() {
        const bool record = recording_;
        if (serving_ == Serving::Class1) {
            const Job j = q1_.front();
            q1_.pop_front();
            const bool was_promoted = promoted_ > 0;
            if (was_promoted) {
                --promoted_;
            }
            if (record) {
                const double rt = now_ - j.arrival;
                res_.t1_samples.push_back(rt);
                res_.total_cost += cumulative(c1_, rt);
                if (opts_.record_tails && was_promoted) {
                    res_.q0_sojourns.push_back(now_ - j.promotion);
                }
                if (opts_.record_jobs) {
                    res_.jobs.push_back({1, j.arrival, now_,
                                         was_promoted ? std::optional<double>(j.promotion) : std::nullopt});
                }
            }
        } else {
            const Job j = q2_.front();
            q2_.pop_front();
            if (record) {
                const double rt = now_ - j.arrival;
                res_.t2_samples.push_back(rt);
                res_.total_cost += c2_ * rt;
                if (opts_.record_jobs) {
                    res_.jobs.push_back({2, j.arrival, now_, std::nullopt});
                }
            }
        }
        ++res_.counts.departures;
        if (!recording_ && res_.counts.departures == opts_.warmup_events) {
            recording_ = true;
            window_start_ = now_;
        }
    }

    void reschedule(bool departed) {
        Serving next = Serving::None;
        if (discipline_ == Discipline::Fcfs) {
            if (!q1_.empty() && !q2_.empty()) {
                next = q1_.front().arrival <= q2_.front().arrival ? Serving::Class1 : Serving::Class2;
            } else if (!q1_.empty()) {
                next = Serving::Class1;
            } else if (!q2_.empty()) {
                next = Serving::Class2;
            }
        } else if (promoted_ > 0) {
            next = Serving::Class1;
        } else if (!q2_.empty()) {
            next = Serving::Class2;
        } else if (!q1_.empty()) {
            next = Serving::Class1;
        }
        if (!departed && serving_ != Serving::None && next != serving_) {
            ++res_.counts.preemptions;
        }
        serving_ = next;
        assert((q1_.empty() && q2_.empty()) == (serving_ == Serving::None));
    }

    const SystemParams params_;
    const Discipline discipline_;
    const double alpha_;
    const HoldingCostFn& c1_;
    const double c2_;
    const SimOptions opts_;

    Xoshiro256 gap1_;
    Xoshiro256 gap2_;
    Xoshiro256 size1_;
    Xoshiro256 size2_;

    double now_ = 0.0;
    double next1_ = kInf;
    double next2_ = kInf;
    double window_start_ = 0.0;
    bool recording_ = false;
    std::deque<Job> q1_;
    std::deque<Job> q2_;
    // q1_[0, promoted_) is Q0, the rest is Q1.
    std::size_t promoted_ = 0;
    Serving serving_ = Serving::None;
    SimResult res_;
};

void require_arrivals(const SystemParams& params) {
    if (!(params.lambda1 + params.lambda2 > 0.0)) {
        throw std::invalid_argument("simulation needs a positive arrival rate");
    }
}

}  // namespace

void SimOptions::validate() const {
    if (!(horizon_events > warmup_events)) {
        throw std::invalid_argument("horizon_events must exceed warmup_events");
    }
}

SimResult simulate_overtake(const SystemParams& params, const AlphaDecision& alpha, const HoldingCostFn& c1,
                            double c2, const SimOptions& opts) {
    params.validate();
    require_arrivals(params);
    opts.validate();
    return Engine(params, Discipline::Overtake, alpha.age(), c1, c2, opts).run();
}

SimResult simulate(const SystemParams& params, const PolicySpec& p, const HoldingCostFn& c1, double c2,
                   const SimOptions& opts) {
    params.validate();
    require_arrivals(params);
    opts.validate();
    if (p.kind() == PolicyKind::Fcfs) {
        return Engine(params, Discipline::Fcfs, kInf, c1, c2, opts).run();
    }
    return simulate_overtake(params, overtake_age(p, params, c1, c2), c1, c2, opts);
}

double time_avg_cost(const SimResult& res, const HoldingCostFn& c1, double c2) {
    if ((res.t1_samples.empty() && res.t2_samples.empty()) || !(res.horizon > 0.0)) {
        throw std::invalid_argument("time_avg_cost: empty simulation result");
    }
    double total = 0.0;
    for (double t : res.t1_samples) {
        total += cumulative(c1, t);
    }
    for (double t : res.t2_samples) {
        total += c2 * t;
    }
    return total / res.horizon;
}

std::vector<double> empirical_tail(std::span<const double> samples, std::span<const double> ts) {
    if (samples.empty()) {
        throw std::invalid_argument("empirical_tail: empty sample");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(ts.size());
    const double n = static_cast<double>(sorted.size());
    for (double t : ts) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        out.push_back(static_cast<double>(above) / n);
    }
    return out;
}

void write_job_csv(std::ostream& os, const SimResult& res) {
    os << "class,arrival,departure,promotion\n";
    for (const JobRecord& j : res.jobs) {
        os << j.class_id << ',' << fmt_double(j.arrival) << ',' << fmt_double(j.departure) << ',';
        if (j.promotion) {
            os << fmt_double(*j.promotion);
        }
        os << '\n';
    }
}

}  // namespace tvhc
