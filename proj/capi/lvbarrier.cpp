#include "lvbarrier.h"

#include "lvb/contract.hpp"
#include "lvb/error.hpp"
#include "lvb/laplace.hpp"
#include "lvb/model.hpp"
#include "lvb/oracle.hpp"
#include "lvb/pricing.hpp"
#include "lvb/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <new>
#include <string>
#include <vector>

struct lvb_model_s {
    lvb::Diffusion model;
};

struct lvb_contract_s {
    lvb::BarrierContract contract;
    std::vector<std::string> warnings;
};

struct lvb_profile_s {
    lvb::DeltaProfile profile;
    lvb_method method;
};

namespace {

thread_local std::string last_error;

struct NullArgument {};

template <class T>
T& deref(T* p) {
    if (!p) throw NullArgument{};
    return *p;
}

template <class F>
lvb_status try_(F&& f) {
    last_error.clear();
    try {
        f();
        return LVB_OK;
    } catch (const lvb::Error& e) {
        last_error = e.what();
        return static_cast<lvb_status>(static_cast<int>(e.code()) + 1);
    } catch (const NullArgument&) {
        last_error = "NullArgument: null argument";
        return LVB_ERR_NULL_ARGUMENT;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return LVB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return LVB_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return LVB_ERR_INTERNAL;
    }
}

lvb::Side side_of(lvb_side s) { return s == LVB_SIDE_UPPER ? lvb::Side::Upper : lvb::Side::Lower; }

lvb::Barrier make_barrier(lvb_barrier_kind kind, double level, double growth) {
    if (kind == LVB_BARRIER_EXPONENTIAL) return lvb::Barrier::exponential(level, growth);
    LVB_REQUIRE(kind == LVB_BARRIER_CONSTANT, lvb::ErrorCode::InvalidContract, "unknown barrier kind");
    return lvb::Barrier::constant(level);
}

lvb::McConfig to_config(const lvb_mc_config& c) {
    lvb::McConfig cfg;
    cfg.paths = c.paths;
    cfg.steps = c.steps;
    cfg.seed = c.seed;
    cfg.bridge_correction = c.bridge_correction != 0;
    return cfg;
}

bool laplace_applies(const lvb::Diffusion& m, const lvb::BarrierContract& c) {
    return m.is_gbm() && c.constant_barriers();
}

} // namespace

extern "C" {

const char* lvb_status_name(lvb_status status) {
    switch (status) {
    case LVB_OK: return "Ok";
    case LVB_ERR_NULL_ARGUMENT: return "NullArgument";
    case LVB_ERR_INTERNAL: return "Internal";
    default:
        if (status > LVB_OK && status < LVB_ERR_NULL_ARGUMENT)
            return lvb::to_string(static_cast<lvb::ErrorCode>(static_cast<int>(status) - 1));
        return "Unknown";
    }
}

int lvb_status_is_validation(lvb_status status) {
    if (status == LVB_ERR_NULL_ARGUMENT) return 1;
    if (status > LVB_OK && status < LVB_ERR_NULL_ARGUMENT)
        return lvb::is_validation_error(static_cast<lvb::ErrorCode>(static_cast<int>(status) - 1)) ? 1 : 0;
    return 0;
}

const char* lvb_last_error(void) { return last_error.c_str(); }

const char* lvb_version(void) { return "1.0.0"; }

lvb_status lvb_model_gbm(double rate, double dividend, double sigma, lvb_model* out) {
    return try_([&] { deref(out) = new lvb_model_s{lvb::Diffusion::gbm(rate - dividend, sigma)}; });
}

lvb_status lvb_model_cev(double rate, double dividend, double sigma0, double rho, lvb_model* out) {
    return try_([&] { deref(out) = new lvb_model_s{lvb::Diffusion::cev(rate - dividend, sigma0, rho)}; });
}

void lvb_model_free(lvb_model model) { delete model; }

lvb_status lvb_contract_create(double maturity, double rate, double dividend, lvb_contract* out) {
    return try_([&] {
        auto* c = new lvb_contract_s{};
        c->contract.maturity = maturity;
        c->contract.rate = rate;
        c->contract.dividend = dividend;
        deref(out) = c;
    });
}

lvb_status lvb_contract_set_barrier(lvb_contract contract, lvb_side side, lvb_barrier_kind kind, double level,
                                    double growth) {
    return try_([&] {
        auto& c = deref(contract).contract;
        (side == LVB_SIDE_UPPER ? c.upper : c.lower) = make_barrier(kind, level, growth);
    });
}

lvb_status lvb_contract_set_payoff(lvb_contract contract, lvb_payoff_kind kind, double a, double b, double c) {
    return try_([&] {
        auto& k = deref(contract).contract;
        switch (kind) {
        case LVB_PAYOFF_CALL: k.payoff = lvb::Payoff::call(a); break;
        case LVB_PAYOFF_PUT: k.payoff = lvb::Payoff::put(a); break;
        case LVB_PAYOFF_DOUBLE_NO_TOUCH: k.payoff = lvb::Payoff::double_no_touch(); break;
        case LVB_PAYOFF_SMOOTH_BUMP: k.payoff = lvb::Payoff::smooth_bump(a, b, c); break;
        default: throw lvb::Error(lvb::ErrorCode::InvalidContract, "unknown payoff kind");
        }
    });
}

lvb_status lvb_contract_smooth_payoff(lvb_contract contract, int level) {
    return try_([&] {
        auto& k = deref(contract).contract;
        k.payoff = lvb::smooth_payoff(k, level);
    });
}

lvb_status lvb_contract_payoff_at(lvb_contract contract, double x, double* out) {
    return try_([&] { deref(out) = deref(contract).contract.payoff(x); });
}

lvb_status lvb_contract_validate(lvb_contract contract, lvb_regime* regime, size_t* warning_count) {
    return try_([&] {
        auto& c = deref(contract);
        c.warnings.clear();
        const lvb::Validation v = lvb::validate(c.contract);
        c.warnings = v.warnings;
        if (regime) *regime = v.regime == lvb::Regime::Smooth ? LVB_REGIME_SMOOTH : LVB_REGIME_L1;
        if (warning_count) *warning_count = c.warnings.size();
    });
}

const char* lvb_contract_warning(lvb_contract contract, size_t i) {
    if (!contract || i >= contract->warnings.size()) return nullptr;
    return contract->warnings[i].c_str();
}

void lvb_contract_free(lvb_contract contract) { delete contract; }

lvb_status lvb_solve(lvb_model model, lvb_contract contract, int n, lvb_method method, lvb_profile* out) {
    return try_([&] {
        const auto& m = deref(model).model;
        const auto& c = deref(contract).contract;
        lvb_profile& dst = deref(out);
        LVB_REQUIRE(n >= 2, lvb::ErrorCode::Domain, "grid needs at least 2 steps");
        const lvb::TimeGrid grid(c.maturity, n);
        if (method == LVB_METHOD_AUTO) method = laplace_applies(m, c) ? LVB_METHOD_LAPLACE : LVB_METHOD_VOLTERRA;
        if (method == LVB_METHOD_LAPLACE) {
            dst = new lvb_profile_s{lvb::solve_laplace(m, c, grid), method};
        } else {
            LVB_REQUIRE(method == LVB_METHOD_VOLTERRA, lvb::ErrorCode::UnsupportedConfiguration, "unknown method");
            dst = new lvb_profile_s{lvb::solve_volterra(m, c, grid), method};
        }
    });
}

lvb_status lvb_profile_method(lvb_profile profile, lvb_method* out) {
    return try_([&] { deref(out) = deref(profile).method; });
}

lvb_status lvb_profile_size(lvb_profile profile, size_t* nodes) {
    return try_([&] { deref(nodes) = static_cast<size_t>(deref(profile).profile.grid.n()) + 1; });
}

lvb_status lvb_profile_times(lvb_profile profile, double* out) {
    return try_([&] {
        const auto& g = deref(profile).profile.grid;
        deref(out);
        for (int i = 0; i <= g.n(); ++i) out[i] = g.node(i);
    });
}

lvb_status lvb_profile_has(lvb_profile profile, lvb_side side, int* out) {
    return try_([&] { deref(out) = deref(profile).profile.has(side_of(side)) ? 1 : 0; });
}

lvb_status lvb_profile_deltas(lvb_profile profile, lvb_side side, double* out) {
    return try_([&] {
        const auto& p = deref(profile).profile;
        deref(out);
        LVB_REQUIRE(p.has(side_of(side)), lvb::ErrorCode::UnsupportedConfiguration, "profile has no such barrier");
        const auto& v = p.side(side_of(side)).values;
        std::copy(v.begin(), v.end(), out);
    });
}

lvb_status lvb_profile_reliable(lvb_profile profile, int* out) {
    return try_([&] {
        const auto& p = deref(profile).profile;
        deref(out);
        const bool flagged = p.near_expiry_unreliable();
        const double T = p.grid.maturity();
        for (int i = 0; i <= p.grid.n(); ++i) out[i] = flagged && p.grid.node(i) > 0.95 * T ? 0 : 1;
    });
}

lvb_status lvb_profile_diagnostics(lvb_profile profile, int* sign_violations, int* near_expiry_unreliable,
                                   double* psi_scale) {
    return try_([&] {
        const auto& p = deref(profile).profile;
        if (sign_violations) *sign_violations = p.sign_violations();
        if (near_expiry_unreliable) *near_expiry_unreliable = p.near_expiry_unreliable() ? 1 : 0;
        if (psi_scale) *psi_scale = p.psi_scale;
    });
}

lvb_status lvb_profile_residual(lvb_model model, lvb_contract contract, lvb_profile profile, double* out) {
    return try_([&] {
        deref(out) = lvb::residual(deref(model).model, deref(contract).contract, deref(profile).profile);
    });
}

lvb_status lvb_delta_at_barrier(lvb_profile profile, double t, double* plus, double* minus,
                                int* near_expiry_unreliable) {
    return try_([&] {
        const lvb::BarrierDeltaAt d = lvb::delta_at_barrier(deref(profile).profile, t);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (plus) *plus = d.plus.value_or(nan);
        if (minus) *minus = d.minus.value_or(nan);
        if (near_expiry_unreliable) *near_expiry_unreliable = d.near_expiry_unreliable ? 1 : 0;
    });
}

void lvb_profile_free(lvb_profile profile) { delete profile; }

lvb_status lvb_price(lvb_model model, lvb_contract contract, lvb_profile profile, double spot,
                     lvb_price_result* out) {
    return try_([&] {
        const lvb::PriceResult r =
            lvb::price(deref(model).model, deref(contract).contract, spot, deref(profile).profile);
        deref(out) = {r.european, r.premium_lower, r.premium_upper, r.price,
                      r.discount_factor, r.discounted_price, r.near_expiry_unreliable ? 1 : 0};
    });
}

lvb_status lvb_ladder(lvb_model model, lvb_contract contract, lvb_profile profile, const double* spots,
                      size_t count, double* prices, double* deltas, double* gammas) {
    return try_([&] {
        deref(spots);
        const std::vector<double> s(spots, spots + count);
        const lvb::Ladder l = lvb::ladder(deref(model).model, deref(contract).contract, s, deref(profile).profile);
        if (prices) std::copy(l.prices.begin(), l.prices.end(), prices);
        if (deltas) std::copy(l.deltas.begin(), l.deltas.end(), deltas);
        if (gammas) std::copy(l.gammas.begin(), l.gammas.end(), gammas);
    });
}

lvb_status lvb_closed_form_single(lvb_model model, lvb_contract contract, double spot, double* out) {
    return try_([&] { deref(out) = lvb::closed_form_gbm_single(deref(model).model, deref(contract).contract, spot); });
}

lvb_status lvb_closed_form_double(lvb_model model, lvb_contract contract, double spot, int max_terms,
                                  double tolerance, double* value, double* last_term, int* terms) {
    return try_([&] {
        const lvb::SeriesValue v =
            lvb::closed_form_gbm_double(deref(model).model, deref(contract).contract, spot, max_terms, tolerance);
        deref(value) = v.value;
        if (last_term) *last_term = v.last_term;
        if (terms) *terms = v.terms;
    });
}

void lvb_mc_config_default(lvb_mc_config* cfg) {
    if (!cfg) return;
    const lvb::McConfig d;
    *cfg = {d.paths, d.steps, d.seed, d.bridge_correction ? 1 : 0};
}

lvb_status lvb_mc_price(lvb_model model, lvb_contract contract, double spot, const lvb_mc_config* cfg,
                        double* estimate, double* standard_error) {
    return try_([&] {
        const lvb::McResult r =
            lvb::mc_price(deref(model).model, deref(contract).contract, spot, to_config(deref(cfg)));
        deref(estimate) = r.estimate;
        if (standard_error) *standard_error = r.standard_error;
    });
}

lvb_status lvb_mc_local_time(lvb_model model, lvb_barrier_kind kind, double level, double growth, double spot,
                             double maturity, double epsilon, const lvb_mc_config* cfg, double* estimate,
                             double* standard_error) {
    return try_([&] {
        const lvb::McResult r = lvb::mc_local_time(deref(model).model, make_barrier(kind, level, growth), spot,
                                                   maturity, epsilon, to_config(deref(cfg)));
        deref(estimate) = r.estimate;
        if (standard_error) *standard_error = r.standard_error;
    });
}

lvb_status lvb_expected_local_time(lvb_model model, lvb_barrier_kind kind, double level, double growth,
                                   double spot, double maturity, double* out) {
    return try_([&] {
        deref(out) =
            lvb::expected_local_time(deref(model).model, make_barrier(kind, level, growth), spot, maturity);
    });
}

} // extern "C"
