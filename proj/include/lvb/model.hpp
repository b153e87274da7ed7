#pragma once

#include <variant>

namespace lvb {

struct Gbm {
    double sigma;
};

// sigma(x) = sigma0 * x^(rho - 1), absorbed at zero.
struct Cev {
    double sigma0;
    double rho;
};

// Risk-neutral local-volatility diffusion dS = mu S dt + S sigma(S) dW.
class Diffusion {
public:
    static Diffusion gbm(double drift, double sigma);
    static Diffusion cev(double drift, double sigma0, double rho);

    double drift() const noexcept { return drift_; }
    bool is_gbm() const noexcept { return std::holds_alternative<Gbm>(variant_); }
    bool is_cev() const noexcept { return std::holds_alternative<Cev>(variant_); }
    const Gbm& as_gbm() const { return std::get<Gbm>(variant_); }
    const Cev& as_cev() const { return std::get<Cev>(variant_); }

    Diffusion with_drift(double drift) const;

private:
    Diffusion(double drift, std::variant<Gbm, Cev> v) : drift_(drift), variant_(v) {}

    double drift_;
    std::variant<Gbm, Cev> variant_;
};

// Log-normal local volatility sigma(x).
double local_vol(const Diffusion& model, double x);

// Absolute diffusion coefficient x * sigma(x).
double abs_vol(const Diffusion& model, double x);

// Transition density p(t; x, y) of the (absorbed) process.
double transition_density(const Diffusion& model, double t, double x, double y);

// q_t(x, y) = p(t; x, y) * y^2 sigma(y)^2.
double kernel_q(const Diffusion& model, double t, double x, double y);

// lim_{s -> 0} sqrt(s) q_s(b, b) = b sigma(b) / sqrt(2 pi).
double kernel_diag(const Diffusion& model, double b);

// d q_t(x, y) / dx: analytic for GBM, central difference for CEV.
double dkernel_dx(const Diffusion& model, double t, double x, double y);

} // namespace lvb
