#pragma once

#include "lvb/contract.hpp"
#include "lvb/error.hpp"
#include "lvb/model.hpp"

#include <optional>

namespace lvbtest {

// Error code raised by f, or nullopt when it returns normally.
template <class F>
std::optional<lvb::ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const lvb::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline lvb::BarrierContract down_out_call(double B, double K, double T = 1.0, double r = 0.0) {
    lvb::BarrierContract c;
    c.lower = lvb::Barrier::constant(B);
    c.payoff = lvb::Payoff::call(K);
    c.maturity = T;
    c.rate = r;
    return c;
}

inline lvb::BarrierContract double_no_touch(double lo, double hi, double T) {
    lvb::BarrierContract c;
    c.lower = lvb::Barrier::constant(lo);
    c.upper = lvb::Barrier::constant(hi);
    c.payoff = lvb::Payoff::double_no_touch();
    c.maturity = T;
    return c;
}

inline lvb::BarrierContract bump(double lo, double hi, double T, double height = 1.0) {
    lvb::BarrierContract c;
    c.lower = lvb::Barrier::constant(lo);
    c.upper = lvb::Barrier::constant(hi);
    c.payoff = lvb::Payoff::smooth_bump(lo, hi, height);
    c.maturity = T;
    return c;
}

} // namespace lvbtest
