#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lvb {

// Time-dependent barrier b(t). Constant or exponential, both C^2 with analytic derivatives.
class Barrier {
public:
    enum class Kind { Constant, Exponential };

    static Barrier constant(double level);
    static Barrier exponential(double level0, double growth);

    Kind kind() const noexcept { return kind_; }
    double level0() const noexcept { return level0_; }
    double growth() const noexcept { return growth_; }
    bool is_constant() const noexcept { return kind_ == Kind::Constant || growth_ == 0.0; }

    double value(double t) const;
    double slope(double t) const;
    double curvature(double t) const;

private:
    Barrier(Kind k, double l, double g) : kind_(k), level0_(l), growth_(g) {}

    Kind kind_;
    double level0_;
    double growth_;
};

double barrier_value(const Barrier& b, double t);
double barrier_slope(const Barrier& b, double t);

class Payoff {
public:
    enum class Kind { Call, Put, DoubleNoTouch, SmoothBump, Smoothed };

    static Payoff call(double strike);
    static Payoff put(double strike);
    static Payoff double_no_touch();
    // height * ((x - left)(right - x))^2 / ((right - left)/2)^4 on [left, right], zero outside.
    static Payoff smooth_bump(double left, double right, double height);

    Kind kind() const noexcept { return kind_; }
    double strike() const noexcept { return strike_; }
    double left() const noexcept { return left_; }
    double right() const noexcept { return right_; }
    double height() const noexcept { return height_; }

    double operator()(double x) const;

    // Points where the payoff (restricted to the corridor) is not smooth; used to split quadrature.
    std::vector<double> breakpoints() const;

    // C^2 approximant from below built by smooth_payoff(); see volterra.hpp.
    struct SmoothedData {
        std::shared_ptr<const Payoff> base;
        int level;
        double lo;      // corridor ends the approximant vanishes at
        double hi;
        double ramp;    // cut-off width at the corridor ends
        double kink;    // smoothing width at strikes
        double shrink;  // (1 - 1/(level * sup))
    };
    static Payoff smoothed(SmoothedData data);
    const SmoothedData* smoothed_data() const noexcept { return smoothed_ ? smoothed_.get() : nullptr; }

private:
    Payoff(Kind k) : kind_(k) {}

    Kind kind_;
    double strike_ = 0.0;
    double left_ = 0.0;
    double right_ = 0.0;
    double height_ = 0.0;
    std::shared_ptr<const SmoothedData> smoothed_;
};

double payoff_eval(const Payoff& p, double x);

enum class Side { Lower, Upper };

struct BarrierContract {
    std::optional<Barrier> lower;
    std::optional<Barrier> upper;
    Payoff payoff = Payoff::double_no_touch();
    double maturity = 1.0;
    double rate = 0.0;
    double dividend = 0.0;

    double drift() const noexcept { return rate - dividend; }
    bool has(Side s) const noexcept { return s == Side::Lower ? lower.has_value() : upper.has_value(); }
    const Barrier& barrier(Side s) const;
    bool is_double() const noexcept { return lower && upper; }
    bool constant_barriers() const noexcept;

    // Corridor (lo, hi) at time t; lo = 0 / hi = inf when the barrier is absent.
    double corridor_lo(double t) const;
    double corridor_hi(double t) const;
    bool inside(double t, double x) const;
};

enum class Regime { Smooth, L1 };

struct Validation {
    Regime regime;
    std::vector<std::string> warnings;
};

// Throws BarrierCrossing / NonpositiveBarrier / NonpositiveMaturity / InvalidContract.
Validation validate(const BarrierContract& contract);

const char* to_string(Regime r) noexcept;

} // namespace lvb
