#include "lvb/oracle.hpp"

#include "lvb/error.hpp"
#include "lvb/european.hpp"
#include "lvb/volterra.hpp"
#include "quadrature.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace lvb {

namespace {

constexpr std::uint64_t kBlock = 4096;

void require_gbm_constant(const Diffusion& model, const BarrierContract& contract) {
    LVB_REQUIRE(model.is_gbm(), ErrorCode::UnsupportedConfiguration, "closed form needs a GBM model");
    LVB_REQUIRE(contract.constant_barriers(), ErrorCode::UnsupportedConfiguration, "closed form needs constant barriers");
    const auto k = contract.payoff.kind();
    LVB_REQUIRE(k == Payoff::Kind::Call || k == Payoff::Kind::Put || k == Payoff::Kind::DoubleNoTouch,
                ErrorCode::UnsupportedConfiguration, "closed form needs a call, put or double no-touch");
}

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t count = 0;

    void merge(const Accumulator& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }

    McResult result(double scale) const {
        if (count == 0) return {};
        const double mean = sum / count;
        const double var = count > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1)) : 0.0;
        return {scale * mean, scale * std::sqrt(var / count)};
    }
};

// Runs `path(rng, normal)` for every path in deterministic blocks and accumulates its return value.
template <class PathFn>
Accumulator run_blocks(const McConfig& cfg, PathFn&& path) {
    Accumulator total;
    const std::uint64_t blocks = (cfg.paths + kBlock - 1) / kBlock;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        std::mt19937_64 rng(seq);
        boost::random::normal_distribution<double> normal;
        Accumulator acc;
        const std::uint64_t n = std::min(kBlock, cfg.paths - b * kBlock);
        for (std::uint64_t p = 0; p < n; ++p) {
            const double v = path(rng, normal);
            acc.sum += v;
            acc.sum_sq += v * v;
        }
        acc.count = n;
        total.merge(acc);
    }
    return total;
}

void check_config(const McConfig& cfg) {
    LVB_REQUIRE(cfg.paths >= 1000, ErrorCode::Domain, "Monte Carlo needs at least 1000 paths");
    LVB_REQUIRE(cfg.steps >= 50, ErrorCode::Domain, "Monte Carlo needs at least 50 steps");
}

double pow_rho(double x, double rho) { return rho == 0.5 ? std::sqrt(x) : std::pow(x, rho); }

} // namespace

double closed_form_gbm_single(const Diffusion& model, const BarrierContract& contract, double S0) {
    require_gbm_constant(model, contract);
    check_drift(model, contract);
    LVB_REQUIRE(!contract.is_double(), ErrorCode::UnsupportedConfiguration, "single-barrier formula needs one barrier");
    validate(contract);
    const double disc = std::exp(-contract.rate * contract.maturity);
    if (!contract.inside(0.0, S0)) return 0.0;
    const double B = contract.lower ? contract.lower->level0() : contract.upper->level0();
    const double sigma = model.as_gbm().sigma;
    const double k = 2.0 * model.drift() / (sigma * sigma) - 1.0;
    const EuropeanValuator euro(model, contract);
    const double v = euro.value(0.0, S0) - std::pow(B / S0, k) * euro.value(0.0, B * B / S0);
    return disc * v;
}

SeriesValue closed_form_gbm_double(const Diffusion& model, const BarrierContract& contract, double S0,
                                   int max_terms, double tolerance) {
    require_gbm_constant(model, contract);
    check_drift(model, contract);
    LVB_REQUIRE(contract.is_double(), ErrorCode::UnsupportedConfiguration, "image series needs two barriers");
    validate(contract);
    SeriesValue out;
    if (!contract.inside(0.0, S0)) return out;
    const double sigma = model.as_gbm().sigma;
    const double m = model.drift() - 0.5 * sigma * sigma;
    const double x = std::log(S0);
    const double l = std::log(contract.lower->level0());
    const double L = std::log(contract.upper->level0()) - l;
    const EuropeanValuator euro(model, contract);
    const auto pair = [&](int k) {
        const double c = x + 2.0 * k * L;
        const double cr = 2.0 * l - x + 2.0 * k * L;
        return std::exp(m * (c - x) / (sigma * sigma)) * euro.value(0.0, std::exp(c)) -
               std::exp(m * (cr - x) / (sigma * sigma)) * euro.value(0.0, std::exp(cr));
    };
    double sum = pair(0);
    out.last_term = std::fabs(sum);
    out.terms = 1;
    for (int k = 1; k <= max_terms; ++k) {
        const double a = pair(k);
        const double b = pair(-k);
        sum += a + b;
        out.last_term = std::fabs(a) + std::fabs(b);
        out.terms = k + 1;
        if (out.last_term < tolerance) break;
    }
    out.value = std::exp(-contract.rate * contract.maturity) * sum;
    return out;
}

McResult mc_price(const Diffusion& model, const BarrierContract& contract, double S0, const McConfig& cfg) {
    check_config(cfg);
    check_drift(model, contract);
    validate(contract);
    LVB_REQUIRE(contract.inside(0.0, S0), ErrorCode::SpotOutsideCorridor, "spot must lie inside the corridor");
    const double T = contract.maturity;
    const int N = cfg.steps;
    const double dt = T / N;
    const double sdt = std::sqrt(dt);
    const double mu = model.drift();
    const bool has_lo = contract.lower.has_value();
    const bool has_hi = contract.upper.has_value();

    // Barriers in log space at each monitoring date; exponential barriers are linear there.
    std::vector<double> llo(N + 1, -INFINITY), lhi(N + 1, INFINITY);
    for (int i = 0; i <= N; ++i) {
        if (has_lo) llo[i] = std::log(contract.lower->value(i * dt));
        if (has_hi) lhi[i] = std::log(contract.upper->value(i * dt));
    }
    const Payoff& payoff = contract.payoff;
    const auto terminal = [&](double x) { return x > llo[N] && x < lhi[N] ? payoff(std::exp(x)) : 0.0; };

    // Survival probability of the bridge over one step given log distances to a barrier at both ends.
    const auto survive = [](double d0, double d1, double var) {
        const double a = 2.0 * d0 * d1 / var;
        return a > 40.0 ? 1.0 : -std::expm1(-a);
    };

    Accumulator acc;
    if (model.is_gbm()) {
        const double sigma = model.as_gbm().sigma;
        const double drift = (mu - 0.5 * sigma * sigma) * dt;
        const double vol = sigma * sdt;
        const double var = sigma * sigma * dt;
        acc = run_blocks(cfg, [&](std::mt19937_64& rng, boost::random::normal_distribution<double>& z) {
            double x = std::log(S0);
            double w = 1.0;
            for (int i = 1; i <= N; ++i) {
                const double nx = x + drift + vol * z(rng);
                if (nx <= llo[i] || nx >= lhi[i]) return 0.0;
                if (cfg.bridge_correction) {
                    if (has_lo) w *= survive(x - llo[i - 1], nx - llo[i], var);
                    if (has_hi) w *= survive(lhi[i - 1] - x, lhi[i] - nx, var);
                }
                x = nx;
            }
            return w * terminal(x);
        });
    } else {
        const Cev cev = model.as_cev();
        std::vector<double> blo(N + 1), bhi(N + 1);
        for (int i = 0; i <= N; ++i) {
            blo[i] = std::exp(llo[i]);
            bhi[i] = std::exp(lhi[i]);
        }
        acc = run_blocks(cfg, [&](std::mt19937_64& rng, boost::random::normal_distribution<double>& z) {
            double s = S0;
            double w = 1.0;
            for (int i = 1; i <= N; ++i) {
                const double loc = cev.sigma0 * pow_rho(s, cev.rho) / s;
                const double ns = s + mu * s * dt + loc * s * sdt * z(rng);
                if (ns <= blo[i] || ns >= bhi[i] || ns <= 0.0) return 0.0;
                if (cfg.bridge_correction) {
                    // log(u/v) >= (u - v)/u bounds the log distances cheaply before taking logs.
                    const double var = loc * loc * dt;
                    if (has_lo && 2.0 * (s - blo[i - 1]) / s * (ns - blo[i]) / ns < 40.0 * var)
                        w *= survive(std::log(s) - llo[i - 1], std::log(ns) - llo[i], var);
                    if (has_hi && 2.0 * (bhi[i - 1] - s) / bhi[i - 1] * (bhi[i] - ns) / bhi[i] < 40.0 * var)
                        w *= survive(lhi[i - 1] - std::log(s), lhi[i] - std::log(ns), var);
                }
                s = ns;
            }
            return w * terminal(std::log(s));
        });
    }
    return acc.result(std::exp(-contract.rate * T));
}

McResult mc_local_time(const Diffusion& model, const Barrier& barrier, double S0, double T, double epsilon,
                       const McConfig& cfg) {
    check_config(cfg);
    LVB_REQUIRE(std::isfinite(epsilon) && epsilon > 0.0, ErrorCode::Domain, "band width must be > 0");
    LVB_REQUIRE(std::isfinite(T) && T > 0.0, ErrorCode::NonpositiveMaturity, "horizon must be > 0");
    LVB_REQUIRE(std::isfinite(S0) && S0 > 0.0, ErrorCode::Domain, "spot must be > 0");
    const int N = cfg.steps;
    const double dt = T / N;
    const double sdt = std::sqrt(dt);
    const double mu = model.drift();
    // Band edges at the end of each step, in log space.
    std::vector<double> band_lo(N + 1), band_hi(N + 1);
    for (int i = 0; i <= N; ++i) {
        const double b = barrier.value(i * dt);
        band_lo[i] = std::log(b);
        band_hi[i] = std::log(b + epsilon);
    }
    const auto weight = [&](double s) {
        const double v = abs_vol(model, s);
        return v * v * dt / epsilon;
    };

    Accumulator acc;
    if (model.is_gbm()) {
        const double sigma = model.as_gbm().sigma;
        const double drift = (mu - 0.5 * sigma * sigma) * dt;
        const double vol = sigma * sdt;
        acc = run_blocks(cfg, [&](std::mt19937_64& rng, boost::random::normal_distribution<double>& z) {
            double x = std::log(S0);
            double occ = 0.0;
            for (int i = 1; i <= N; ++i) {
                x += drift + vol * z(rng);
                if (x >= band_lo[i] && x < band_hi[i]) occ += weight(std::exp(x));
            }
            return occ;
        });
    } else {
        const Cev cev = model.as_cev();
        acc = run_blocks(cfg, [&](std::mt19937_64& rng, boost::random::normal_distribution<double>& z) {
            double s = S0;
            double occ = 0.0;
            for (int i = 1; i <= N; ++i) {
                s += mu * s * dt + cev.sigma0 * pow_rho(s, cev.rho) * sdt * z(rng);
                if (s <= 0.0) break;
                const double x = std::log(s);
                if (x >= band_lo[i] && x < band_hi[i]) occ += weight(s);
            }
            return occ;
        });
    }
    return acc.result(1.0);
}

double expected_local_time(const Diffusion& model, const Barrier& barrier, double S0, double T) {
    LVB_REQUIRE(std::isfinite(T) && T > 0.0, ErrorCode::NonpositiveMaturity, "horizon must be > 0");
    const auto f = [&](double s) {
        const double u = s * s;
        if (!(u > 0.0)) return 2.0 * kernel_diag(model, barrier.value(0.0)) * (S0 == barrier.value(0.0) ? 1.0 : 0.0);
        return 2.0 * s * kernel_q(model, u, S0, barrier.value(u));
    };
    return detail::integrate(f, 0.0, std::sqrt(T), 1e-11, 1e-15, "expected local time");
}

} // namespace lvb
