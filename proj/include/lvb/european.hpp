#pragma once

#include "lvb/contract.hpp"
#include "lvb/grid.hpp"
#include "lvb/model.hpp"

#include <vector>

namespace lvb {

enum class EuropeanMethod { ClosedFormGbm, Quadrature };

// phi(t, x) = E_{t,x}[payoff(S_T) 1{b-(T) < S_T < b+(T)}] under the drift-only dynamics.
// No discounting is applied here.
class EuropeanValuator {
public:
    // Picks the closed form for GBM with Call/Put/DoubleNoTouch, quadrature otherwise.
    EuropeanValuator(Diffusion model, BarrierContract contract);
    EuropeanValuator(Diffusion model, BarrierContract contract, EuropeanMethod method);

    const Diffusion& model() const noexcept { return model_; }
    const BarrierContract& contract() const noexcept { return contract_; }
    EuropeanMethod method() const noexcept { return method_; }

    double value(double t, double x) const;
    // d phi / dx.
    double delta(double t, double x) const;
    // d phi / d(T - t) at fixed x; analytic on the closed-form path, 5-point difference otherwise.
    double dtau(double t, double x) const;

private:
    double value_tau(double tau, double x) const;
    double closed_form(double tau, double x, int what) const;
    double quadrature(double tau, double x, bool derivative) const;

    Diffusion model_;
    BarrierContract contract_;
    EuropeanMethod method_;
};

double european_value(const EuropeanValuator& v, double t, double x);

// phi(t_i, b(t_i)) along the chosen barrier. At t = T the one-sided limit on the barrier is
// half the payoff there, since half the terminal mass leaves the corridor.
std::vector<double> psi_profile(const EuropeanValuator& v, const TimeGrid& grid, Side which);

} // namespace lvb
