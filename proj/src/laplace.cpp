#include "lvb/laplace.hpp"

#include "lvb/error.hpp"
#include "lvb/european.hpp"
#include "lvb/specialfn.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lvb {

namespace {

using cplx = std::complex<double>;

constexpr int kNodesFine = 64;
constexpr int kNodesCoarse = 32;
constexpr double kInversionTol = 1e-6;

double side_sign(Side s) { return s == Side::Lower ? 1.0 : -1.0; }

double gbm_alpha(const Diffusion& model) {
    const double sigma = model.as_gbm().sigma;
    const double m = model.drift() - 0.5 * sigma * sigma;
    return m * m / (2.0 * sigma * sigma);
}

void require_constant_gbm(const Diffusion& model, const BarrierContract& contract) {
    LVB_REQUIRE(model.is_gbm(), ErrorCode::UnsupportedConfiguration, "Laplace solver needs a GBM model");
    LVB_REQUIRE(contract.constant_barriers(), ErrorCode::UnsupportedConfiguration,
                "Laplace solver needs constant barriers");
    validate(contract);
    check_drift(model, contract);
}

std::vector<Side> sides_of(const BarrierContract& c) {
    if (c.is_double()) return {Side::Upper, Side::Lower};
    return {c.lower ? Side::Lower : Side::Upper};
}

// Transform of K = Q/2 on a complex s, m x m row-major.
std::array<cplx, 4> kernel_matrix(const Diffusion& model, const BarrierContract& contract,
                                  const std::vector<Side>& sides, cplx s) {
    std::array<cplx, 4> out{};
    const int m = static_cast<int>(sides.size());
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c)
            out[a * m + c] = 0.5 * laplace_transform_kernel_exact(model, contract, sides[a], sides[c], s);
    return out;
}

// sqrt(t) H(t) for the 2x2 system by contour inversion of K(s)^{-1} / s with `nodes` points.
std::array<double, 4> invert_double(const Diffusion& model, const BarrierContract& contract,
                                    const std::vector<Side>& sides, double t, int nodes) {
    const double pi = std::numbers::pi;
    std::array<double, 4> acc{};
    for (int k = 0; k < nodes / 2; ++k) {
        const double th = (k + 0.5) * 2.0 * pi / nodes;
        const double c = 0.6407 * th;
        const double sn = std::sin(c);
        const double cot = std::cos(c) / sn;
        const cplx s(nodes / t * (0.5017 * th * cot - 0.6122), nodes / t * 0.2645 * th);
        const cplx ds(nodes / t * (0.5017 * cot - 0.5017 * c / (sn * sn)), nodes / t * 0.2645);
        const auto K = kernel_matrix(model, contract, sides, s);
        const cplx det = K[0] * K[3] - K[1] * K[2];
        LVB_REQUIRE(std::abs(det) > 1e-14 * std::abs(K[0] * K[3]), ErrorCode::DeterminantVanishing,
                    "transform matrix is singular on the inversion contour");
        const cplx f = std::exp(s * t) * ds / (s * det);
        const std::array<cplx, 4> inv{K[3], -K[1], -K[2], K[0]};
        for (int e = 0; e < 4; ++e) acc[e] += (f * inv[e]).imag();
    }
    for (double& v : acc) v *= 2.0 / nodes * std::sqrt(t);
    return acc;
}

} // namespace

ConvolutionKernel ConvolutionKernel::for_model(const Diffusion& model) {
    LVB_REQUIRE(model.is_gbm(), ErrorCode::UnsupportedConfiguration, "convolution kernel needs a GBM model");
    return {gbm_alpha(model)};
}

double ConvolutionKernel::operator()(double t) const {
    LVB_REQUIRE(t > 0.0, ErrorCode::Domain, "kernel needs t > 0");
    return std::exp(-alpha * t) / std::sqrt(std::numbers::pi * t);
}

double ConvolutionKernel::transform(double s) const {
    LVB_REQUIRE(s > 0.0, ErrorCode::Domain, "transform needs s > 0");
    const double a = s + alpha;
    const auto f = [a](double u) { return 2.0 * std::exp(-a * u * u) / std::sqrt(std::numbers::pi); };
    return detail::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12, 1e-300, "kernel transform");
}

double auxiliary_h(double alpha, double t) {
    LVB_REQUIRE(std::isfinite(t) && t > 0.0, ErrorCode::Domain, "auxiliary h needs t > 0");
    LVB_REQUIRE(alpha >= 0.0, ErrorCode::Domain, "alpha must be >= 0");
    const double ra = std::sqrt(alpha);
    return std::exp(-alpha * t) / std::sqrt(std::numbers::pi * t) + ra * specialfn::erf(std::sqrt(alpha * t));
}

double laplace_transform_kernel(const Diffusion& model, const BarrierContract& contract, Side row, Side col,
                                double s) {
    LVB_REQUIRE(s > 0.0, ErrorCode::Domain, "transform needs s > 0");
    require_constant_gbm(model, contract);
    const double x = contract.barrier(row).level0();
    const double y = contract.barrier(col).level0();
    const double sg = side_sign(col);
    const auto f = [&](double u) {
        if (!(u > 0.0)) return x == y ? 2.0 * sg * kernel_diag(model, x) : 0.0;
        const double t = u * u;
        const double e = std::exp(-s * t);
        if (e == 0.0) return 0.0;
        return 2.0 * u * e * sg * kernel_q(model, t, x, y);
    };
    return detail::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-11, 1e-300, "kernel transform");
}

std::complex<double> laplace_transform_kernel_exact(const Diffusion& model, const BarrierContract& contract, Side row,
                                                    Side col, std::complex<double> s) {
    LVB_REQUIRE(model.is_gbm() && contract.constant_barriers(), ErrorCode::UnsupportedConfiguration,
                "closed-form transform needs GBM and constant barriers");
    const double sigma = model.as_gbm().sigma;
    const double m = model.drift() - 0.5 * sigma * sigma;
    const double x = contract.barrier(row).level0();
    const double y = contract.barrier(col).level0();
    const double L = std::log(y / x);
    const cplx root = std::sqrt(2.0 * (s + gbm_alpha(model)));
    return side_sign(col) * y * sigma * std::exp(L * m / (sigma * sigma)) * std::exp(-std::fabs(L) * root / sigma) /
           root;
}

ResolventTable resolvent_table(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid) {
    require_constant_gbm(model, contract);
    ResolventTable out{grid, sides_of(contract), {}, 0.0};
    const int n = grid.n();
    const int m = out.m();
    out.scaled.assign(n + 1, std::array<double, 4>{});
    for (int a = 0; a < m; ++a) {
        const double level = contract.barrier(out.sides[a]).level0();
        out.scaled[0][a * m + a] = side_sign(out.sides[a]) * 2.0 * std::numbers::sqrt2 /
                                   (abs_vol(model, level) * std::sqrt(std::numbers::pi));
    }
    if (m == 1) {
        const double alpha = gbm_alpha(model);
        const double scale = out.scaled[0][0] * std::sqrt(std::numbers::pi);
        for (int i = 1; i <= n; ++i) {
            const double x = grid.node(i);
            out.scaled[i][0] = scale * std::sqrt(x) * auxiliary_h(alpha, x);
        }
        return out;
    }
    double ref = std::max(std::fabs(out.scaled[0][0]), std::fabs(out.scaled[0][3]));
    for (int i = 1; i <= n; ++i) {
        const double x = grid.node(i);
        const auto fine = invert_double(model, contract, out.sides, x, kNodesFine);
        const auto coarse = invert_double(model, contract, out.sides, x, kNodesCoarse);
        for (int e = 0; e < 4; ++e) {
            LVB_REQUIRE(std::isfinite(fine[e]), ErrorCode::InversionUnstable, "non-finite inverse transform");
            out.inversion_error = std::max(out.inversion_error, std::fabs(fine[e] - coarse[e]));
        }
        out.scaled[i] = fine;
    }
    LVB_REQUIRE(out.inversion_error <= kInversionTol * ref, ErrorCode::InversionUnstable,
                "contour inversion with 32 and 64 nodes disagrees by " + std::to_string(out.inversion_error));
    return out;
}

std::vector<double> singular_convolution(const std::vector<double>& a, const std::vector<double>& b, double h) {
    LVB_REQUIRE(a.size() == b.size() && !a.empty(), ErrorCode::Domain, "convolution samples must have equal length");
    const int n = static_cast<int>(a.size()) - 1;
    std::vector<double> out(n + 1);
    out[0] = std::numbers::pi * a[0] * b[0];
    std::vector<double> theta, root;
    for (int i = 1; i <= n; ++i) {
        const double x = i * h;
        theta.resize(i + 1);
        root.resize(i + 1);
        for (int j = 0; j <= i; ++j) {
            theta[j] = std::atan2(std::sqrt(static_cast<double>(j)), std::sqrt(static_cast<double>(i - j)));
            root[j] = h * std::sqrt(static_cast<double>(j) * (i - j));
        }
        double sum = 0.0;
        for (int j = 0; j < i; ++j) {
            const double dth = theta[j + 1] - theta[j];
            const double m0 = 2.0 * dth;
            const double m1 = x * dth - (root[j + 1] - root[j]);
            const double sl = j * h;
            const double sr = (j + 1) * h;
            const double wl = (sr * m0 - m1) / h;
            const double wr = (m1 - sl * m0) / h;
            sum += wl * a[i - j] * b[j] + wr * a[i - j - 1] * b[j + 1];
        }
        out[i] = sum;
    }
    return out;
}

namespace {

DeltaProfile solve_constant(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid) {
    require_constant_gbm(model, contract);
    LVB_REQUIRE(grid.maturity() == contract.maturity, ErrorCode::ProfileMismatch, "grid maturity differs from T");
    const ResolventTable H = resolvent_table(model, contract, grid);
    const int n = grid.n();
    const int m = H.m();
    const double h = grid.step();
    const double T = contract.maturity;
    const EuropeanValuator euro(model, contract);

    // Psi_c(0+) and sqrt(y) Psi_c'(y) on the grid; the y -> 0 value by extrapolation in sqrt(y).
    std::vector<double> psi0(m);
    std::vector<std::vector<double>> bt(m, std::vector<double>(n + 1));
    double psi_scale = 0.0;
    for (int c = 0; c < m; ++c) {
        const double B = contract.barrier(H.sides[c]).level0();
        for (double v : psi_profile(euro, grid, H.sides[c])) psi_scale = std::max(psi_scale, std::fabs(v));
        const double p0 = 0.5 * contract.payoff(B);
        psi0[c] = std::fabs(p0) > 1e-12 * std::max(1.0, psi_scale) ? p0 : 0.0;
        const auto scaled_slope = [&](double y) { return std::sqrt(y) * euro.dtau(T - y, B); };
        for (int j = 1; j <= n; ++j) bt[c][j] = scaled_slope(grid.node(j));
        const double e1 = std::max(1e-6 * h, 2e-8);
        bt[c][0] = 2.0 * scaled_slope(e1) - scaled_slope(4.0 * e1);
    }

    DeltaProfile out{grid, std::nullopt, std::nullopt, psi_scale, std::nullopt};
    for (int a = 0; a < m; ++a) {
        std::vector<double> f(n + 1, 0.0);
        double regular0 = 0.0;
        for (int c = 0; c < m; ++c) {
            std::vector<double> ac(n + 1);
            for (int i = 0; i <= n; ++i) ac[i] = H.at(i, a, c);
            const auto conv = singular_convolution(ac, bt[c], h);
            for (int i = 1; i <= n; ++i) f[i] += ac[i] / std::sqrt(i * h) * psi0[c] + conv[i];
            f[0] += 2.0 * ac[0] * psi0[c] / std::sqrt(h) + conv[0];
            regular0 += conv[0];
        }
        BarrierDeltas d;
        d.singular = H.at(0, a, a) * psi0[a];
        d.values.resize(n + 1);
        d.regular.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            const int j = n - i;
            d.values[i] = f[j];
            d.regular[i] = j == 0 ? regular0 : f[j] - d.singular / std::sqrt(j * h);
        }
        annotate_deltas(d, H.sides[a], psi_scale);
        (H.sides[a] == Side::Lower ? out.lower : out.upper) = std::move(d);
    }
    return out;
}

} // namespace

DeltaProfile solve_constant_single(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid) {
    LVB_REQUIRE(!contract.is_double(), ErrorCode::UnsupportedConfiguration, "single solver needs exactly one barrier");
    return solve_constant(model, contract, grid);
}

DeltaProfile solve_constant_double(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid) {
    LVB_REQUIRE(contract.is_double(), ErrorCode::UnsupportedConfiguration, "double solver needs both barriers");
    return solve_constant(model, contract, grid);
}

DeltaProfile solve_laplace(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid) {
    return solve_constant(model, contract, grid);
}

} // namespace lvb
