#pragma once

#include "lvb/contract.hpp"
#include "lvb/model.hpp"
#include "lvb/volterra.hpp"

#include <optional>
#include <vector>

namespace lvb {

// Z = european + premium_lower + premium_upper; V = discount_factor * Z.
struct PriceResult {
    double european = 0.0;
    double premium_lower = 0.0;  // -(1/2) int Delta_-(t) q_t(S0, b_-(t)) dt
    double premium_upper = 0.0;  // +(1/2) int Delta_+(t) q_t(S0, b_+(t)) dt
    double price = 0.0;          // undiscounted Z
    double discount_factor = 1.0;
    double discounted_price = 0.0;
    bool near_expiry_unreliable = false;
};

struct Ladder {
    std::vector<double> spots;
    std::vector<double> prices;  // discounted
    std::vector<double> deltas;
    std::vector<double> gammas;
};

PriceResult price(const Diffusion& model, const BarrierContract& contract, double S0, const DeltaProfile& profile);

// Discounted dV/dS0 from the differentiated representation.
double price_delta(const Diffusion& model, const BarrierContract& contract, double S0, const DeltaProfile& profile);

// One profile reused for every spot; gammas are differences of the delta ladder
// (neighbouring spots when there are at least three, a small symmetric bump otherwise).
Ladder ladder(const Diffusion& model, const BarrierContract& contract, const std::vector<double>& spots,
              const DeltaProfile& profile);

struct BarrierDeltaAt {
    std::optional<double> plus;
    std::optional<double> minus;
    bool near_expiry_unreliable = false;
};

// Linear interpolation of the regular part plus the exact singular term; node values are returned as stored.
BarrierDeltaAt delta_at_barrier(const DeltaProfile& profile, double t);

} // namespace lvb
