#include "lvb/pricing.hpp"

#include "lvb/error.hpp"
#include "lvb/european.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace lvb {

namespace {

void check_inputs(const BarrierContract& contract, double S0, const DeltaProfile& profile) {
    LVB_REQUIRE(std::isfinite(S0) && contract.inside(0.0, S0), ErrorCode::SpotOutsideCorridor,
                "spot must lie strictly inside the corridor at t=0");
    LVB_REQUIRE(profile.grid.maturity() == contract.maturity, ErrorCode::ProfileMismatch,
                "profile was solved for a different maturity");
    for (Side s : {Side::Lower, Side::Upper})
        LVB_REQUIRE(profile.has(s) == contract.has(s), ErrorCode::ProfileMismatch,
                    "profile barriers differ from the contract");
}

struct Pair {
    double q = 0.0;
    double dq = 0.0;  // d/dS0
};

// Kernel and its S0-derivative together; the GBM derivative is a factor on q.
Pair kernel_pair(const Diffusion& model, double t, double S0, double y, bool want_dq) {
    if (!want_dq) return {kernel_q(model, t, S0, y), 0.0};
    if (model.is_gbm()) {
        const double sigma = model.as_gbm().sigma;
        const double q = kernel_q(model, t, S0, y);
        const double z = std::log(y / S0) - (model.drift() - 0.5 * sigma * sigma) * t;
        return {q, q * z / (sigma * sigma * t * S0)};
    }
    return {kernel_q(model, t, S0, y), dkernel_dx(model, t, S0, y)};
}

// int_0^T Delta(t) (q, dq/dS0)(t, S0, b(t)) dt. The regular part is linear between solve nodes
// and integrated against the kernel panel by panel. The kernel behaves like exp(-a / t) / sqrt(t)
// with a = log(S0 / b)^2 / (2 sigma^2), so panels with h (a / t^2 + 1 / t) small get 3-point
// Gauss-Legendre and the rest (the peak near t = 0 for S0 close to the barrier) adaptive
// quadrature in sqrt(t). singular / sqrt(T - t) is integrated with T - t = s^2.
Pair barrier_integral(const Diffusion& model, double S0, const BarrierDeltas& d, const Barrier& b,
                      const TimeGrid& grid, bool want_dq) {
    static constexpr double gl_x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double gl_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const int n = grid.n();
    const double h = grid.step();
    const double T = grid.maturity();
    Pair sum;
    for (int i = 0; i < n; ++i) {
        const double t0 = grid.node(i), t1 = grid.node(i + 1);
        const double r0 = d.regular[i], r1 = d.regular[i + 1];
        if (r0 == 0.0 && r1 == 0.0) continue;
        const auto delta = [&](double t) {
            const double w = (t - t0) / h;
            return (1.0 - w) * r0 + w * r1;
        };
        bool smooth = false;
        if (t0 > 0.0) {
            const double bt = b.value(t0);
            const double sig = std::min(local_vol(model, S0), local_vol(model, bt));
            const double lg = std::log(S0 / bt);
            const double a = lg * lg / (2.0 * sig * sig);
            smooth = h * (a / (t0 * t0) + 1.0 / t0) < 0.5;
        }
        if (smooth) {
            const double mid = 0.5 * (t0 + t1);
            for (int k = 0; k < 3; ++k) {
                const double t = mid + 0.5 * h * gl_x[k];
                const Pair g = kernel_pair(model, t, S0, b.value(t), want_dq);
                const double w = 0.5 * h * gl_w[k] * delta(t);
                sum.q += w * g.q;
                sum.dq += w * g.dq;
            }
        } else {
            // In u = sqrt(t) the peak at t ~ a widens to u ~ sqrt(a) and the 1 / sqrt(t) factor cancels.
            const double abs_tol = 1e-15 * h * (std::fabs(r0) + std::fabs(r1));
            const auto on_u = [&](double u, bool dq) {
                const double t = u * u;
                if (!(t > 0.0)) return 0.0;
                const Pair g = kernel_pair(model, t, S0, b.value(t), dq);
                return 2.0 * u * delta(t) * (dq ? g.dq : g.q);
            };
            const double u0 = std::sqrt(t0), u1 = std::sqrt(t1);
            sum.q += detail::integrate([&](double u) { return on_u(u, false); }, u0, u1, 1e-10, abs_tol, "premium");
            if (want_dq)
                sum.dq += detail::integrate([&](double u) { return on_u(u, true); }, u0, u1, 1e-10, abs_tol,
                                            "premium delta");
        }
    }
    if (d.singular != 0.0) {
        const auto on_s = [&](double s, bool dq) {
            const double t = T - s * s;
            if (!(t > 0.0)) return 0.0;
            const Pair g = kernel_pair(model, t, S0, b.value(t), dq);
            return 2.0 * (dq ? g.dq : g.q);
        };
        sum.q += d.singular *
                 detail::integrate([&](double s) { return on_s(s, false); }, 0.0, std::sqrt(T), 1e-10, 1e-15,
                                   "singular premium");
        if (want_dq)
            sum.dq += d.singular * detail::integrate([&](double s) { return on_s(s, true); }, 0.0, std::sqrt(T),
                                                     1e-10, 1e-15, "singular premium delta");
    }
    return sum;
}

struct Valued {
    PriceResult result;
    double delta = 0.0;
};

Valued value_at(const Diffusion& model, const BarrierContract& contract, const EuropeanValuator& euro, double S0,
                const DeltaProfile& profile, bool want_delta) {
    check_inputs(contract, S0, profile);
    Valued v;
    PriceResult& r = v.result;
    r.european = euro.value(0.0, S0);
    double dz = want_delta ? euro.delta(0.0, S0) : 0.0;
    if (profile.lower) {
        const Pair p = barrier_integral(model, S0, *profile.lower, *contract.lower, profile.grid, want_delta);
        r.premium_lower = -0.5 * p.q + 0.0;
        dz -= 0.5 * p.dq;
    }
    if (profile.upper) {
        const Pair p = barrier_integral(model, S0, *profile.upper, *contract.upper, profile.grid, want_delta);
        r.premium_upper = 0.5 * p.q + 0.0;
        dz += 0.5 * p.dq;
    }
    r.price = r.european + r.premium_lower + r.premium_upper;
    r.discount_factor = std::exp(-contract.rate * contract.maturity);
    r.discounted_price = r.discount_factor * r.price;
    r.near_expiry_unreliable = profile.near_expiry_unreliable();
    v.delta = r.discount_factor * dz;
    return v;
}

} // namespace

PriceResult price(const Diffusion& model, const BarrierContract& contract, double S0, const DeltaProfile& profile) {
    check_drift(model, contract);
    const EuropeanValuator euro(model, contract);
    return value_at(model, contract, euro, S0, profile, false).result;
}

double price_delta(const Diffusion& model, const BarrierContract& contract, double S0, const DeltaProfile& profile) {
    check_drift(model, contract);
    const EuropeanValuator euro(model, contract);
    return value_at(model, contract, euro, S0, profile, true).delta;
}

Ladder ladder(const Diffusion& model, const BarrierContract& contract, const std::vector<double>& spots,
              const DeltaProfile& profile) {
    Ladder out;
    out.spots = spots;
    const std::size_t k = spots.size();
    out.prices.resize(k);
    out.deltas.resize(k);
    out.gammas.resize(k);
    check_drift(model, contract);
    const EuropeanValuator euro(model, contract);
    for (std::size_t i = 0; i < k; ++i) {
        const Valued v = value_at(model, contract, euro, spots[i], profile, true);
        out.prices[i] = v.result.discounted_price;
        out.deltas[i] = v.delta;
    }
    if (k >= 3) {
        for (std::size_t i = 0; i < k; ++i) {
            // Three-point derivative on possibly uneven spacing, one-sided at the ends.
            const std::size_t c = i == 0 ? 1 : (i == k - 1 ? k - 2 : i);
            const double x0 = spots[c - 1], x1 = spots[c], x2 = spots[c + 1];
            const double f0 = out.deltas[c - 1], f1 = out.deltas[c], f2 = out.deltas[c + 1];
            LVB_REQUIRE(x0 < x1 && x1 < x2, ErrorCode::Domain, "ladder spots must be strictly increasing");
            const double x = spots[i];
            out.gammas[i] = f0 * (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
                            f1 * (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
                            f2 * (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        }
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            const double S = spots[i];
            const double room = std::min(S - contract.corridor_lo(0.0), contract.corridor_hi(0.0) - S);
            const double e = std::min(1e-3 * S, 0.5 * room);
            out.gammas[i] = (price_delta(model, contract, S + e, profile) - price_delta(model, contract, S - e, profile)) /
                            (2.0 * e);
        }
    }
    return out;
}

BarrierDeltaAt delta_at_barrier(const DeltaProfile& profile, double t) {
    const TimeGrid& g = profile.grid;
    const double T = g.maturity();
    LVB_REQUIRE(t >= 0.0 && t <= T, ErrorCode::Domain, "t must lie in [0, T]");
    const int n = g.n();
    const double h = g.step();
    const auto at = [&](const BarrierDeltas& d) {
        const int i = std::min(static_cast<int>(t / h), n - 1);
        if (t == g.node(i)) return d.values[i];
        if (t == g.node(i + 1)) return d.values[i + 1];
        const double w = (t - g.node(i)) / h;
        const double reg = (1.0 - w) * d.regular[i] + w * d.regular[i + 1];
        return reg + (d.singular != 0.0 ? d.singular / std::sqrt(T - t) : 0.0);
    };
    BarrierDeltaAt out;
    if (profile.upper) out.plus = at(*profile.upper);
    if (profile.lower) out.minus = at(*profile.lower);
    out.near_expiry_unreliable = profile.near_expiry_unreliable();
    return out;
}

} // namespace lvb
