#include "lvb/contract.hpp"

#include "lvb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lvb {

namespace {

// C^2 step on [0, 1] with vanishing first and second derivatives at both ends.
double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

// C^2 convex ramp below max(u, 0): r'' = 6u(1-u) on [0, 1], r = u - 1/2 beyond.
double smooth_ramp(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return u - 0.5;
    return u * u * u * (1.0 - 0.5 * u);
}

double smoothed_eval(const Payoff::SmoothedData& d, double x) {
    if (x <= d.lo || x >= d.hi) return 0.0;
    double cut = 1.0;
    if (d.ramp > 0.0) {
        if (d.lo > 0.0) cut *= smoothstep((x - d.lo) / d.ramp);
        if (std::isfinite(d.hi)) cut *= smoothstep((d.hi - x) / d.ramp);
    }
    const Payoff& base = *d.base;
    double g;
    switch (base.kind()) {
    case Payoff::Kind::Call: g = d.kink * smooth_ramp((x - base.strike()) / d.kink); break;
    case Payoff::Kind::Put: g = d.kink * smooth_ramp((base.strike() - x) / d.kink); break;
    case Payoff::Kind::DoubleNoTouch: g = 1.0; break;
    default: g = base(x); break;
    }
    return cut * g * d.shrink;
}

} // namespace

Barrier Barrier::constant(double level) {
    LVB_REQUIRE(std::isfinite(level) && level > 0.0, ErrorCode::NonpositiveBarrier, "barrier level must be > 0");
    return Barrier(Kind::Constant, level, 0.0);
}

Barrier Barrier::exponential(double level0, double growth) {
    LVB_REQUIRE(std::isfinite(level0) && level0 > 0.0, ErrorCode::NonpositiveBarrier,
                "barrier level must be > 0");
    LVB_REQUIRE(std::isfinite(growth), ErrorCode::InvalidContract, "barrier growth must be finite");
    return Barrier(Kind::Exponential, level0, growth);
}

double Barrier::value(double t) const {
    return kind_ == Kind::Constant ? level0_ : level0_ * std::exp(growth_ * t);
}

double Barrier::slope(double t) const {
    return kind_ == Kind::Constant ? 0.0 : growth_ * value(t);
}

double Barrier::curvature(double t) const {
    return kind_ == Kind::Constant ? 0.0 : growth_ * growth_ * value(t);
}

double barrier_value(const Barrier& b, double t) { return b.value(t); }
double barrier_slope(const Barrier& b, double t) { return b.slope(t); }

Payoff Payoff::call(double strike) {
    LVB_REQUIRE(std::isfinite(strike) && strike >= 0.0, ErrorCode::InvalidContract, "strike must be >= 0");
    Payoff p(Kind::Call);
    p.strike_ = strike;
    return p;
}

Payoff Payoff::put(double strike) {
    LVB_REQUIRE(std::isfinite(strike) && strike >= 0.0, ErrorCode::InvalidContract, "strike must be >= 0");
    Payoff p(Kind::Put);
    p.strike_ = strike;
    return p;
}

Payoff Payoff::double_no_touch() { return Payoff(Kind::DoubleNoTouch); }

Payoff Payoff::smooth_bump(double left, double right, double height) {
    LVB_REQUIRE(std::isfinite(left) && std::isfinite(right) && left >= 0.0 && left < right,
                ErrorCode::InvalidContract, "smooth bump needs 0 <= left < right");
    LVB_REQUIRE(std::isfinite(height) && height >= 0.0, ErrorCode::InvalidContract, "bump height must be >= 0");
    Payoff p(Kind::SmoothBump);
    p.left_ = left;
    p.right_ = right;
    p.height_ = height;
    return p;
}

Payoff Payoff::smoothed(SmoothedData data) {
    Payoff p(Kind::Smoothed);
    p.smoothed_ = std::make_shared<const SmoothedData>(std::move(data));
    return p;
}

double Payoff::operator()(double x) const {
    switch (kind_) {
    case Kind::Call: return std::max(x - strike_, 0.0);
    case Kind::Put: return std::max(strike_ - x, 0.0);
    case Kind::DoubleNoTouch: return 1.0;
    case Kind::SmoothBump: {
        if (x <= left_ || x >= right_) return 0.0;
        const double half = 0.5 * (right_ - left_);
        const double v = (x - left_) * (right_ - x) / (half * half);
        return height_ * v * v;
    }
    case Kind::Smoothed: return smoothed_eval(*smoothed_, x);
    }
    return 0.0;
}

std::vector<double> Payoff::breakpoints() const {
    switch (kind_) {
    case Kind::Call:
    case Kind::Put: return {strike_};
    case Kind::SmoothBump: return {left_, right_};
    case Kind::Smoothed: {
        const auto& d = *smoothed_;
        std::vector<double> pts;
        if (d.lo > 0.0) pts.push_back(d.lo + d.ramp);
        if (std::isfinite(d.hi)) pts.push_back(d.hi - d.ramp);
        const Kind bk = d.base->kind();
        if (bk == Kind::Call) pts.insert(pts.end(), {d.base->strike(), d.base->strike() + d.kink});
        if (bk == Kind::Put) pts.insert(pts.end(), {d.base->strike() - d.kink, d.base->strike()});
        if (bk == Kind::SmoothBump) pts.insert(pts.end(), {d.base->left(), d.base->right()});
        return pts;
    }
    default: return {};
    }
}

double payoff_eval(const Payoff& p, double x) { return p(x); }

const Barrier& BarrierContract::barrier(Side s) const {
    const auto& b = s == Side::Lower ? lower : upper;
    LVB_REQUIRE(b.has_value(), ErrorCode::InvalidContract, "contract has no such barrier");
    return *b;
}

bool BarrierContract::constant_barriers() const noexcept {
    return (!lower || lower->is_constant()) && (!upper || upper->is_constant());
}

double BarrierContract::corridor_lo(double t) const { return lower ? lower->value(t) : 0.0; }

double BarrierContract::corridor_hi(double t) const {
    return upper ? upper->value(t) : std::numeric_limits<double>::infinity();
}

bool BarrierContract::inside(double t, double x) const { return x > corridor_lo(t) && x < corridor_hi(t); }

const char* to_string(Regime r) noexcept { return r == Regime::Smooth ? "smooth_regime" : "L1_regime"; }

Validation validate(const BarrierContract& c) {
    LVB_REQUIRE(std::isfinite(c.maturity) && c.maturity > 0.0, ErrorCode::NonpositiveMaturity,
                "maturity must be > 0");
    LVB_REQUIRE(c.lower || c.upper, ErrorCode::InvalidContract, "at least one barrier is required");
    LVB_REQUIRE(std::isfinite(c.rate) && std::isfinite(c.dividend), ErrorCode::InvalidContract,
                "rate and dividend must be finite");
    const double T = c.maturity;
    for (const auto* b : {&c.lower, &c.upper}) {
        if (!*b) continue;
        LVB_REQUIRE((*b)->value(0.0) > 0.0 && (*b)->value(T) > 0.0, ErrorCode::NonpositiveBarrier,
                    "barrier must stay positive on [0, T]");
    }
    if (c.is_double()) {
        // log(upper/lower) is affine in t for these barrier families, so the endpoints decide;
        // the grid scan guards any future non-affine variant.
        constexpr int kScan = 256;
        for (int i = 0; i <= kScan; ++i) {
            const double t = T * i / kScan;
            LVB_REQUIRE(c.lower->value(t) < c.upper->value(t), ErrorCode::BarrierCrossing,
                        "lower barrier reaches the upper barrier at t=" + std::to_string(t));
        }
    }

    Validation out{Regime::L1, {}};
    const double lo = c.corridor_lo(T);
    const double hi = c.corridor_hi(T);
    const auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); };
    const Payoff& p = c.payoff;
    if (p.kind() == Payoff::Kind::SmoothBump) {
        if (c.is_double() && near(p.left(), lo) && near(p.right(), hi)) out.regime = Regime::Smooth;
        else out.warnings.emplace_back("smooth bump does not match the terminal corridor; payoff is only C^1 there");
    } else if (const auto* d = p.smoothed_data()) {
        const bool lo_ok = !c.lower || near(d->lo, lo);
        const bool hi_ok = !c.upper || near(d->hi, hi);
        if (lo_ok && hi_ok) out.regime = Regime::Smooth;
    }
    if (out.regime == Regime::L1) {
        for (Side s : {Side::Lower, Side::Upper}) {
            if (!c.has(s)) continue;
            const double level = c.barrier(s).value(T);
            if (p(level) != 0.0)
                out.warnings.emplace_back(std::string(s == Side::Lower ? "lower" : "upper") +
                                          " barrier: payoff does not vanish at expiry, delta is unbounded near T");
        }
    }
    if (!c.upper && (p.kind() == Payoff::Kind::Call))
        out.warnings.emplace_back("no upper barrier: payoff is unbounded on the corridor");
    return out;
}

} // namespace lvb
