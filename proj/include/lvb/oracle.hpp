#pragma once

#include "lvb/contract.hpp"
#include "lvb/model.hpp"

#include <cstdint>

namespace lvb {

// All oracle prices are discounted with exp(-r T).

// Reflection formula for one constant barrier under GBM.
double closed_form_gbm_single(const Diffusion& model, const BarrierContract& contract, double S0);

struct SeriesValue {
    double value = 0.0;
    double last_term = 0.0;  // magnitude of the last image pair added
    int terms = 0;
};

// Image series for two constant barriers under GBM; stops once an image pair falls below
// `tolerance` or after `max_terms` pairs on each side.
SeriesValue closed_form_gbm_double(const Diffusion& model, const BarrierContract& contract, double S0,
                                   int max_terms = 200, double tolerance = 1e-12);

struct McConfig {
    std::uint64_t paths = 100000;
    int steps = 100;
    std::uint64_t seed = 42;
    bool bridge_correction = true;
};

struct McResult {
    double estimate = 0.0;
    double standard_error = 0.0;
};

// Exact log increments for GBM, Euler with absorption at zero for CEV. Paths are generated in
// fixed blocks, each seeded from (seed, block index), so results are reproducible bit for bit.
McResult mc_price(const Diffusion& model, const BarrierContract& contract, double S0, const McConfig& cfg);

// Occupation estimate of E[L_T^b(S)] with band [b(t), b(t) + epsilon), weighted by d<S,S>.
McResult mc_local_time(const Diffusion& model, const Barrier& barrier, double S0, double T, double epsilon,
                       const McConfig& cfg);

// int_0^T q_u(S0, b(u)) du by adaptive quadrature; the reference for mc_local_time.
double expected_local_time(const Diffusion& model, const Barrier& barrier, double S0, double T);

} // namespace lvb
