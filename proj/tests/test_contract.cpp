#include "doctest.h"

#include "lvb/contract.hpp"
#include "lvb/error.hpp"

#include <cmath>

using namespace lvb;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InversionUnstable;
}

BarrierContract corridor(Payoff p, double T = 1.0) {
    BarrierContract c;
    c.lower = Barrier::constant(90.0);
    c.upper = Barrier::constant(110.0);
    c.payoff = p;
    c.maturity = T;
    return c;
}

} // namespace

TEST_SUITE("contract") {

TEST_CASE("validate classifies the regime") {
    CHECK(validate(corridor(Payoff::smooth_bump(90, 110, 1.0))).regime == Regime::Smooth);
    CHECK(validate(corridor(Payoff::call(100.0))).regime == Regime::L1);
    CHECK(validate(corridor(Payoff::double_no_touch())).regime == Regime::L1);
    CHECK(validate(corridor(Payoff::smooth_bump(95, 105, 1.0))).regime == Regime::L1);

    BarrierContract single;
    single.lower = Barrier::constant(90.0);
    single.payoff = Payoff::call(90.0);
    CHECK(validate(single).regime == Regime::L1);
    CHECK_FALSE(validate(single).warnings.empty());
    CHECK(std::string(to_string(Regime::Smooth)) == "smooth_regime");
    CHECK(std::string(to_string(Regime::L1)) == "L1_regime");
}

TEST_CASE("validate rejects malformed contracts") {
    BarrierContract c;
    c.lower = Barrier::exponential(100.0, 0.1);
    c.upper = Barrier::constant(105.0);
    c.maturity = 1.0;
    CHECK(code_of([&] { validate(c); }) == ErrorCode::BarrierCrossing);
    c.maturity = 0.4;  // 100 e^{0.04} < 105
    CHECK_NOTHROW(validate(c));

    BarrierContract none;
    none.payoff = Payoff::call(100.0);
    CHECK(code_of([&] { validate(none); }) == ErrorCode::InvalidContract);

    BarrierContract bad = corridor(Payoff::double_no_touch(), 0.0);
    CHECK(code_of([&] { validate(bad); }) == ErrorCode::NonpositiveMaturity);
    bad.maturity = -1.0;
    CHECK(code_of([&] { validate(bad); }) == ErrorCode::NonpositiveMaturity);

    CHECK(code_of([] { Barrier::constant(0.0); }) == ErrorCode::NonpositiveBarrier);
    CHECK(code_of([] { Barrier::exponential(-5.0, 0.1); }) == ErrorCode::NonpositiveBarrier);
    CHECK(code_of([] { Payoff::smooth_bump(110, 90, 1.0); }) == ErrorCode::InvalidContract);

    BarrierContract swapped = corridor(Payoff::double_no_touch());
    swapped.lower = Barrier::constant(120.0);
    CHECK(code_of([&] { validate(swapped); }) == ErrorCode::BarrierCrossing);
}

TEST_CASE("validate is deterministic") {
    const BarrierContract c = corridor(Payoff::call(100.0));
    const Validation a = validate(c), b = validate(c);
    CHECK(a.regime == b.regime);
    CHECK(a.warnings == b.warnings);
}

TEST_CASE("barrier values and slopes") {
    const Barrier c = Barrier::constant(95.0);
    for (double t : {0.0, 0.3, 5.0}) {
        CHECK(barrier_value(c, t) == 95.0);
        CHECK(barrier_slope(c, t) == 0.0);
    }
    const Barrier e = Barrier::exponential(100.0, 0.05);
    CHECK(barrier_value(e, 0.0) == 100.0);
    CHECK(barrier_value(e, 2.0) == doctest::Approx(100.0 * std::exp(0.1)).epsilon(1e-15));
    CHECK(barrier_slope(e, 2.0) == doctest::Approx(5.0 * std::exp(0.1)).epsilon(1e-15));
    CHECK(e.curvature(2.0) == doctest::Approx(0.25 * std::exp(0.1)).epsilon(1e-15));
    CHECK(e.is_constant() == false);
    CHECK(Barrier::exponential(100.0, 0.0).is_constant());
}

TEST_CASE("payoff values") {
    CHECK(payoff_eval(Payoff::call(100.0), 110.0) == 10.0);
    CHECK(payoff_eval(Payoff::call(100.0), 90.0) == 0.0);
    CHECK(payoff_eval(Payoff::put(100.0), 90.0) == 10.0);
    CHECK(payoff_eval(Payoff::double_no_touch(), 1e-3) == 1.0);
    CHECK(payoff_eval(Payoff::double_no_touch(), 1e6) == 1.0);
    const Payoff b = Payoff::smooth_bump(90.0, 110.0, 1.0);
    CHECK(payoff_eval(b, 100.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(payoff_eval(b, 90.0) == 0.0);
    CHECK(payoff_eval(b, 110.0) == 0.0);
    CHECK(payoff_eval(b, 80.0) == 0.0);
    for (double x = 0.0; x < 300.0; x += 0.37)
        for (const Payoff& p : {Payoff::call(100.0), Payoff::put(100.0), Payoff::double_no_touch(), b})
            CHECK(payoff_eval(p, x) >= 0.0);
}

TEST_CASE("smooth bump has a continuous second derivative") {
    const Payoff b = Payoff::smooth_bump(90.0, 110.0, 1.0);
    const double h = 1e-3;
    const auto d2 = [&](double x) { return (b(x + h) - 2 * b(x) + b(x - h)) / (h * h); };
    double scale = 0.0;
    for (int i = 0; i <= 1000; ++i) scale = std::max(scale, std::fabs(d2(90.0 + 20.0 * i / 1000)));
    double worst = 0.0;
    for (int i = 1; i < 999; ++i) {
        const double x = 90.0 + 20.0 * i / 1000;
        worst = std::max(worst, std::fabs(d2(x + 0.02) - d2(x)) / scale);
    }
    CHECK(worst < 0.02);
}

TEST_CASE("contract accessors") {
    BarrierContract c = corridor(Payoff::double_no_touch());
    c.rate = 0.05;
    c.dividend = 0.02;
    CHECK(c.drift() == doctest::Approx(0.03));
    CHECK(c.is_double());
    CHECK(c.constant_barriers());
    CHECK(c.inside(0.0, 100.0));
    CHECK_FALSE(c.inside(0.0, 90.0));
    CHECK_FALSE(c.inside(0.0, 110.0));
    CHECK(c.corridor_lo(0.5) == 90.0);
    BarrierContract up;
    up.upper = Barrier::constant(120.0);
    CHECK(up.corridor_lo(0.0) == 0.0);
    CHECK(up.corridor_hi(1.0) == 120.0);
    CHECK(std::isinf(c.corridor_hi(0.0)) == false);
    CHECK(code_of([&] { up.barrier(Side::Lower); }) == ErrorCode::InvalidContract);
}

}
