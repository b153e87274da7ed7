#include "lvb/european.hpp"

#include "lvb/error.hpp"
#include "lvb/specialfn.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lvb {

namespace {

constexpr double kExpiryCutoff = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

using specialfn::norm_cdf_between;
using specialfn::norm_pdf;

enum Quantity { kValue = 0, kDelta = 1, kDtau = 2 };

bool closed_form_payoff(const Payoff& p) {
    return p.kind() == Payoff::Kind::Call || p.kind() == Payoff::Kind::Put ||
           p.kind() == Payoff::Kind::DoubleNoTouch;
}

// Building blocks for S_T = x exp(m tau + sigma sqrt(tau) Z) restricted to (lo, hi):
// prob = P(lo < S_T < hi), mean = E[S_T; lo < S_T < hi], plus their x- and tau-derivatives.
struct Blocks {
    double prob = 0.0, prob_x = 0.0, prob_tau = 0.0;
    double mean = 0.0, mean_x = 0.0, mean_tau = 0.0;
};

Blocks gbm_blocks(double mu, double sigma, double tau, double x, double lo, double hi) {
    Blocks b;
    if (!(hi > lo)) return b;
    const double m = mu - 0.5 * sigma * sigma;
    const double sd = sigma * std::sqrt(tau);
    const double fwd = x * std::exp(mu * tau);

    struct End {
        double d = 0.0, d1 = 0.0, d_tau = 0.0, d1_tau = 0.0, pdf = 0.0, pdf1 = 0.0;
    };
    const auto end = [&](double k, double inf_sign) {
        End e;
        if (k <= 0.0 || !std::isfinite(k)) {
            e.d = e.d1 = inf_sign * kInf;
            return e;
        }
        const double a = std::log(x / k);
        e.d = (a + m * tau) / sd;
        e.d1 = e.d + sd;
        e.d_tau = -a / (2.0 * sigma * tau * std::sqrt(tau)) + m / (2.0 * sigma * std::sqrt(tau));
        e.d1_tau = -a / (2.0 * sigma * tau * std::sqrt(tau)) + (m + sigma * sigma) / (2.0 * sigma * std::sqrt(tau));
        e.pdf = norm_pdf(e.d);
        e.pdf1 = norm_pdf(e.d1);
        return e;
    };
    const End l = end(lo, 1.0);   // d(lo) -> +inf when lo = 0
    const End h = end(hi, -1.0);  // d(hi) -> -inf when hi = inf

    b.prob = norm_cdf_between(h.d, l.d);
    b.prob_x = (l.pdf - h.pdf) / (x * sd);
    b.prob_tau = l.pdf * l.d_tau - h.pdf * h.d_tau;
    const double p1 = norm_cdf_between(h.d1, l.d1);
    b.mean = fwd * p1;
    b.mean_x = fwd / x * p1 + fwd * (l.pdf1 - h.pdf1) / (x * sd);
    b.mean_tau = mu * fwd * p1 + fwd * (l.pdf1 * l.d1_tau - h.pdf1 * h.d1_tau);
    return b;
}

double pick(const Blocks& b, int what, double k_weight) {
    switch (what) {
    case kValue: return b.mean - k_weight * b.prob;
    case kDelta: return b.mean_x - k_weight * b.prob_x;
    default: return b.mean_tau - k_weight * b.prob_tau;
    }
}

} // namespace

EuropeanValuator::EuropeanValuator(Diffusion model, BarrierContract contract)
    : EuropeanValuator(model, contract,
                       model.is_gbm() && closed_form_payoff(contract.payoff) ? EuropeanMethod::ClosedFormGbm
                                                                             : EuropeanMethod::Quadrature) {}

EuropeanValuator::EuropeanValuator(Diffusion model, BarrierContract contract, EuropeanMethod method)
    : model_(model), contract_(std::move(contract)), method_(method) {
    LVB_REQUIRE(method_ != EuropeanMethod::ClosedFormGbm || (model_.is_gbm() && closed_form_payoff(contract_.payoff)),
                ErrorCode::UnsupportedConfiguration, "closed form needs GBM with a call, put or double no-touch");
}

double EuropeanValuator::value(double t, double x) const {
    LVB_REQUIRE(std::isfinite(x) && x > 0.0, ErrorCode::Domain, "price level must be > 0");
    return value_tau(contract_.maturity - t, x);
}

double EuropeanValuator::value_tau(double tau, double x) const {
    LVB_REQUIRE(tau >= 0.0, ErrorCode::Domain, "time must not exceed maturity");
    const double T = contract_.maturity;
    const double lo = contract_.corridor_lo(T);
    const double hi = contract_.corridor_hi(T);
    if (tau < kExpiryCutoff) {
        const auto on = [x](double b) { return std::fabs(x - b) <= 1e-12 * b; };
        if ((lo > 0.0 && on(lo)) || (std::isfinite(hi) && on(hi))) return 0.5 * contract_.payoff(x);
        return (x > lo && x < hi) ? contract_.payoff(x) : 0.0;
    }
    if (method_ == EuropeanMethod::ClosedFormGbm) return closed_form(tau, x, kValue);
    return quadrature(tau, x, false);
}

double EuropeanValuator::delta(double t, double x) const {
    LVB_REQUIRE(std::isfinite(x) && x > 0.0, ErrorCode::Domain, "price level must be > 0");
    const double tau = contract_.maturity - t;
    LVB_REQUIRE(tau >= kExpiryCutoff, ErrorCode::Domain, "delta needs t < T");
    if (method_ == EuropeanMethod::ClosedFormGbm) return closed_form(tau, x, kDelta);
    return quadrature(tau, x, true);
}

double EuropeanValuator::dtau(double t, double x) const {
    LVB_REQUIRE(std::isfinite(x) && x > 0.0, ErrorCode::Domain, "price level must be > 0");
    const double tau = contract_.maturity - t;
    LVB_REQUIRE(tau >= kExpiryCutoff, ErrorCode::Domain, "dtau needs t < T");
    if (method_ == EuropeanMethod::ClosedFormGbm) return closed_form(tau, x, kDtau);
    const double e = 1e-2 * tau;
    return (value_tau(tau - 2 * e, x) - 8.0 * value_tau(tau - e, x) + 8.0 * value_tau(tau + e, x) -
            value_tau(tau + 2 * e, x)) /
           (12.0 * e);
}

double EuropeanValuator::closed_form(double tau, double x, int what) const {
    const double T = contract_.maturity;
    const double lo = contract_.corridor_lo(T);
    const double hi = contract_.corridor_hi(T);
    const double mu = model_.drift();
    const double sigma = model_.as_gbm().sigma;
    const Payoff& p = contract_.payoff;
    switch (p.kind()) {
    case Payoff::Kind::Call:
        return pick(gbm_blocks(mu, sigma, tau, x, std::max(lo, p.strike()), hi), what, p.strike());
    case Payoff::Kind::Put:
        return -pick(gbm_blocks(mu, sigma, tau, x, lo, std::min(hi, p.strike())), what, p.strike());
    default: {
        const Blocks b = gbm_blocks(mu, sigma, tau, x, lo, hi);
        return what == kValue ? b.prob : what == kDelta ? b.prob_x : b.prob_tau;
    }
    }
}

double EuropeanValuator::quadrature(double tau, double x, bool derivative) const {
    const double T = contract_.maturity;
    const double lo = contract_.corridor_lo(T);
    const double hi = contract_.corridor_hi(T);
    const double sx = local_vol(model_, x);
    // CEV volatility grows as the level falls; size the window with the volatility a few
    // deviations below x so the lower tail is covered.
    double sw = sx;
    if (model_.is_cev()) sw = std::max(sx, local_vol(model_, x * std::exp(-8.0 * sx * std::sqrt(tau))));
    const double centre = std::log(x) + (model_.drift() - 0.5 * sx * sx) * tau;
    const double width = 12.0 * sw * std::sqrt(tau);
    double ua = centre - width;
    double ub = centre + width;
    if (lo > 0.0) ua = std::max(ua, std::log(lo));
    if (std::isfinite(hi)) ub = std::min(ub, std::log(hi));
    if (!(ub > ua)) return 0.0;

    std::vector<double> cuts{ua, ub};
    if (centre > ua && centre < ub) cuts.push_back(centre);
    for (double bp : contract_.payoff.breakpoints())
        if (bp > 0.0 && std::log(bp) > ua && std::log(bp) < ub) cuts.push_back(std::log(bp));
    std::sort(cuts.begin(), cuts.end());

    const Payoff& p = contract_.payoff;
    const auto integrand = [&](double u) {
        const double y = std::exp(u);
        const double py = p(y);
        if (py == 0.0) return 0.0;
        const double v = abs_vol(model_, y);
        const double q = derivative ? dkernel_dx(model_, tau, x, y) : kernel_q(model_, tau, x, y);
        return py * q / (v * v) * y;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        total += detail::integrate(integrand, cuts[i], cuts[i + 1], 1e-10, 1e-12, "european value");
    }
    return total;
}

double european_value(const EuropeanValuator& v, double t, double x) { return v.value(t, x); }

std::vector<double> psi_profile(const EuropeanValuator& v, const TimeGrid& grid, Side which) {
    const Barrier& b = v.contract().barrier(which);
    std::vector<double> out(grid.n() + 1);
    for (int i = 0; i <= grid.n(); ++i) {
        const double t = grid.node(i);
        out[i] = v.value(t, b.value(t));
    }
    return out;
}

} // namespace lvb
