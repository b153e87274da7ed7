#include "lvb/model.hpp"

#include "lvb/error.hpp"
#include "lvb/specialfn.hpp"

#include <cmath>
#include <numbers>

namespace lvb {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

void require_positive(double v, const char* what) {
    LVB_REQUIRE(std::isfinite(v) && v > 0.0, ErrorCode::Domain, std::string(what) + " must be > 0");
}

double gbm_kernel(double mu, double sigma, double t, double x, double y) {
    const double s2t = sigma * sigma * t;
    const double z = std::log(y / x) - (mu - 0.5 * sigma * sigma) * t;
    return y * sigma * kInvSqrt2Pi / std::sqrt(t) * std::exp(-z * z / (2.0 * s2t));
}

// CEV kernel in log form; exp(-X - Y) I_nu(2 sqrt(XY)) is folded into the
// exponentially scaled Bessel function so nothing overflows as t -> 0.
double cev_log_kernel(double mu, const Cev& c, double t, double x, double y) {
    const double one_m_rho = 1.0 - c.rho;
    const double nu = 1.0 / (2.0 * one_m_rho);
    const double s02 = c.sigma0 * c.sigma0;
    const double growth = 2.0 * t * mu * one_m_rho;
    double k;
    if (std::fabs(growth) < 1e-12)
        k = 1.0 / (2.0 * s02 * one_m_rho * one_m_rho * t);
    else
        k = mu / (s02 * one_m_rho * std::expm1(growth));
    const double X = k * std::pow(x, 2.0 * one_m_rho) * std::exp(growth);
    const double Y = k * std::pow(y, 2.0 * one_m_rho);
    const double z = 2.0 * std::sqrt(X * Y);
    const double gap = std::sqrt(X) - std::sqrt(Y);
    const double log_pref = std::log(2.0 * s02 * one_m_rho) + 2.0 * c.rho * std::log(y) + nu * std::log(k) +
                            (std::log(X) + (1.0 - 4.0 * c.rho) * std::log(Y)) / (4.0 - 4.0 * c.rho);
    return log_pref + std::log(specialfn::bessel_i_scaled(nu, z)) - gap * gap;
}

} // namespace

Diffusion Diffusion::gbm(double drift, double sigma) {
    LVB_REQUIRE(std::isfinite(drift), ErrorCode::Domain, "drift must be finite");
    require_positive(sigma, "GBM sigma");
    return Diffusion(drift, Gbm{sigma});
}

Diffusion Diffusion::cev(double drift, double sigma0, double rho) {
    LVB_REQUIRE(std::isfinite(drift), ErrorCode::Domain, "drift must be finite");
    require_positive(sigma0, "CEV sigma0");
    LVB_REQUIRE(rho > 0.0 && rho < 1.0, ErrorCode::Domain, "CEV rho must lie in (0, 1)");
    LVB_REQUIRE(1.0 / (2.0 - 2.0 * rho) <= 10.0, ErrorCode::Domain,
                "CEV rho too close to 1 (Bessel order above 10); use GBM");
    return Diffusion(drift, Cev{sigma0, rho});
}

Diffusion Diffusion::with_drift(double drift) const {
    Diffusion d = *this;
    d.drift_ = drift;
    return d;
}

double local_vol(const Diffusion& model, double x) {
    require_positive(x, "price level");
    if (model.is_gbm()) return model.as_gbm().sigma;
    const Cev& c = model.as_cev();
    return c.sigma0 * std::pow(x, c.rho - 1.0);
}

double abs_vol(const Diffusion& model, double x) { return x * local_vol(model, x); }

double kernel_q(const Diffusion& model, double t, double x, double y) {
    require_positive(t, "time");
    require_positive(x, "x");
    require_positive(y, "y");
    if (model.is_gbm()) return gbm_kernel(model.drift(), model.as_gbm().sigma, t, x, y);
    return std::exp(cev_log_kernel(model.drift(), model.as_cev(), t, x, y));
}

double transition_density(const Diffusion& model, double t, double x, double y) {
    const double v = abs_vol(model, y);
    return kernel_q(model, t, x, y) / (v * v);
}

double kernel_diag(const Diffusion& model, double b) {
    require_positive(b, "barrier level");
    return abs_vol(model, b) * kInvSqrt2Pi;
}

double dkernel_dx(const Diffusion& model, double t, double x, double y) {
    if (model.is_gbm()) {
        const double sigma = model.as_gbm().sigma;
        const double z = std::log(y / x) - (model.drift() - 0.5 * sigma * sigma) * t;
        return kernel_q(model, t, x, y) * z / (sigma * sigma * t * x);
    }
    const double dx = 1e-4 * x;
    return (kernel_q(model, t, x + dx, y) - kernel_q(model, t, x - dx, y)) / (2.0 * dx);
}

} // namespace lvb
