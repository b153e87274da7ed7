#pragma once

#include "lvb/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace lvb::detail {

constexpr int kMaxDepth = 20;
constexpr int kMaxPanels = 4000;

inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Panel {
    double a, b, value, error, l1;
    int depth;
};

// 15-point Kronrod estimate with the embedded 7-point Gauss rule as error indicator.
template <class F>
Panel gk15(F& f, double a, double b, int depth) {
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double kr = wk[0] * f0;
    double ga = wg[0] * f0;
    double l1 = wk[0] * std::fabs(f0);
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double u = f(mid - half * xk[i]);
        const double v = f(mid + half * xk[i]);
        kr += wk[i] * (u + v);
        l1 += wk[i] * (std::fabs(u) + std::fabs(v));
        if (i % 2 == 0) ga += wg[i / 2] * (u + v);
    }
    return {a, b, half * kr, half * std::fabs(kr - ga), half * l1, depth};
}

// Globally adaptive Gauss-Kronrod on [a, b] (b may be +inf). Bisects the panel with the largest
// error until the total error is below rel_tol * L1 + abs_tol; throws QuadratureFailure when a
// panel would exceed 20 levels of bisection.
template <class F>
double integrate_finite(F& f, double a, double b, double rel_tol, double abs_tol, const char* what) {
    std::vector<Panel> heap;
    const auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    heap.push_back(gk15(f, a, b, 0));
    double value = heap[0].value, error = heap[0].error, l1 = heap[0].l1;
    for (;;) {
        if (error <= rel_tol * l1 + abs_tol) {
            // Re-sum to shed drift from the running updates before accepting.
            value = error = l1 = 0.0;
            for (const Panel& p : heap) {
                value += p.value;
                error += p.error;
                l1 += p.l1;
            }
            if (error <= rel_tol * l1 + abs_tol) break;
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Panel worst = heap.back();
        heap.pop_back();
        LVB_REQUIRE(worst.depth < kMaxDepth && static_cast<int>(heap.size()) < kMaxPanels,
                    ErrorCode::QuadratureFailure,
                    std::string(what) + ": tolerance not reached (error " + fmt_g(error) + ", L1 " + fmt_g(l1) +
                        ", near [" + fmt_g(worst.a) + ", " + fmt_g(worst.b) + "])");
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = gk15(f, worst.a, mid, worst.depth + 1);
        const Panel right = gk15(f, mid, worst.b, worst.depth + 1);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }
    LVB_REQUIRE(std::isfinite(value), ErrorCode::QuadratureFailure, std::string(what) + ": non-finite integrand");
    return value;
}

template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 1e-15,
                 const char* what = "integral") {
    if (!(b > a)) return 0.0;
    if (std::isinf(b)) {
        // x = a + u / (1 - u) on u in [0, 1).
        auto g = [&](double u) {
            const double w = 1.0 - u;
            return f(a + u / w) / (w * w);
        };
        return integrate_finite(g, 0.0, 1.0, rel_tol, abs_tol, what);
    }
    return integrate_finite(f, a, b, rel_tol, abs_tol, what);
}

} // namespace lvb::detail
