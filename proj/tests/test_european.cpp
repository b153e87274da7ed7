#include "doctest.h"
#include "support.hpp"

#include "lvb/european.hpp"
#include "lvb/specialfn.hpp"

#include <cmath>
#include <vector>

using namespace lvb;
using namespace lvbtest;
using lvb::specialfn::norm_cdf;

TEST_SUITE("european") {

TEST_CASE("zero payoff gives zero") {
    const auto m = Diffusion::gbm(0.0, 0.2);
    const EuropeanValuator v(m, bump(90, 110, 1.0, 0.0));
    for (double x : {91.0, 100.0, 109.0}) {
        CHECK(v.value(0.0, x) == 0.0);
        CHECK(v.delta(0.0, x) == 0.0);
    }
}

TEST_CASE("call struck at the barrier, on the barrier") {
    const double B = 90.0, s = 0.2;
    const auto m = Diffusion::gbm(0.0, s);
    const EuropeanValuator v(m, down_out_call(B, B));
    for (double t : {0.0, 0.3, 0.9}) {
        const double st = s * std::sqrt(1.0 - t);
        const double expect = B * (norm_cdf(st / 2) - norm_cdf(-st / 2));
        CHECK(v.value(t, B) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("truncated call reference value") {
    BarrierContract c;
    c.upper = Barrier::constant(120.0);
    c.payoff = Payoff::call(100.0);
    const auto m = Diffusion::gbm(0.0, 0.2);
    const EuropeanValuator cf(m, c);
    const EuropeanValuator qd(m, c, EuropeanMethod::Quadrature);
    CHECK(cf.method() == EuropeanMethod::ClosedFormGbm);
    CHECK(std::fabs(cf.value(0.0, 100.0) - 2.701012418523759) < 1e-10);
    CHECK(std::fabs(qd.value(0.0, 100.0) - 2.701012418523759) < 1e-8);
}

TEST_CASE("closed form agrees with quadrature") {
    const auto m = Diffusion::gbm(0.02, 0.25);
    std::vector<BarrierContract> cs = {down_out_call(90, 110), double_no_touch(85, 115, 1.0)};
    BarrierContract put;
    put.upper = Barrier::constant(115.0);
    put.payoff = Payoff::put(105.0);
    cs.push_back(put);
    for (const auto& c : cs) {
        const EuropeanValuator cf(m, c);
        const EuropeanValuator qd(m, c, EuropeanMethod::Quadrature);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const double t = 0.18 * i;
                const double x = 91.0 + 5.5 * j;
                CHECK(std::fabs(cf.value(t, x) - qd.value(t, x)) < 1e-7);
                CHECK(std::fabs(cf.delta(t, x) - qd.delta(t, x)) < 1e-6);
            }
    }
}

TEST_CASE("delta and dtau match finite differences") {
    const auto m = Diffusion::gbm(0.01, 0.3);
    const EuropeanValuator v(m, down_out_call(90, 105));
    for (double x : {92.0, 100.0, 115.0}) {
        const double h = 1e-4 * x;
        const double fd = (v.value(0.2, x + h) - v.value(0.2, x - h)) / (2 * h);
        CHECK(v.delta(0.2, x) == doctest::Approx(fd).epsilon(1e-6));
        const double k = 1e-5;
        // dtau is the derivative in T - t, i.e. minus the derivative in t.
        const double ft = -(v.value(0.2 + k, x) - v.value(0.2 - k, x)) / (2 * k);
        CHECK(v.dtau(0.2, x) == doctest::Approx(ft).epsilon(1e-5));
    }
}

TEST_CASE("psi profile on the barrier") {
    const double B = 90.0, s = 0.2;
    const auto m = Diffusion::gbm(0.0, s);
    const EuropeanValuator v(m, down_out_call(B, B));
    const TimeGrid g(1.0, 16);
    const auto psi = psi_profile(v, g, Side::Lower);
    REQUIRE(psi.size() == 17u);
    for (int i = 0; i < 16; ++i) {
        const double st = s * std::sqrt(1.0 - g.node(i));
        CHECK(psi[i] == doctest::Approx(B * (2 * norm_cdf(st / 2) - 1)).epsilon(1e-12));
    }
    CHECK(psi[16] == 0.0);

    const EuropeanValuator dnt(m, double_no_touch(90, 110, 1.0));
    const auto up = psi_profile(dnt, g, Side::Upper);
    CHECK(up[16] == doctest::Approx(0.5));
}

TEST_CASE("monotone in the strike and bounded by the payoff supremum") {
    const auto m = Diffusion::cev(0.0, 2.0, 0.5);
    const EuropeanValuator a(m, down_out_call(90, 110));
    const EuropeanValuator b(m, down_out_call(90, 109));
    for (double x : {95.0, 100.0, 120.0}) CHECK(a.value(0.0, x) <= b.value(0.0, x));

    const auto g = Diffusion::gbm(0.0, 0.3);
    const EuropeanValuator d(g, double_no_touch(80, 120, 2.0));
    for (double x : {81.0, 100.0, 119.0}) {
        const double val = d.value(0.0, x);
        CHECK(val >= 0.0);
        CHECK(val <= 1.0);
    }
}

}
