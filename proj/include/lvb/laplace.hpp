#pragma once

#include "lvb/contract.hpp"
#include "lvb/grid.hpp"
#include "lvb/model.hpp"
#include "lvb/volterra.hpp"

#include <array>
#include <complex>
#include <vector>

namespace lvb {

// Normalised GBM barrier kernel q(t) = exp(-alpha t) / sqrt(pi t).
struct ConvolutionKernel {
    double alpha;

    static ConvolutionKernel for_model(const Diffusion& model);

    double operator()(double t) const;
    // Laplace transform by quadrature; the closed form is 1 / sqrt(s + alpha).
    double transform(double s) const;
};

// Resolvent h of 1 = h * q: exp(-alpha t) / sqrt(pi t) + sqrt(alpha) erf(sqrt(alpha t)).
double auxiliary_h(double alpha, double t);

// Laplace transform of the constant-barrier kernel entry Q_{row,col}(t) = s_col q_t(B_row, B_col),
// with s = +1 for the lower and -1 for the upper barrier.
double laplace_transform_kernel(const Diffusion& model, const BarrierContract& contract, Side row, Side col,
                                double s);
std::complex<double> laplace_transform_kernel_exact(const Diffusion& model, const BarrierContract& contract, Side row,
                                                    Side col, std::complex<double> s);

// Inverse Laplace transform on the optimised cotangent (Talbot-type) contour with `nodes` points.
template <class F>
double talbot_inverse(F&& transform, double t, int nodes);

// Resolvent H of Q/2 * H = I (step function), stored as sqrt(x) H(x) on the grid; entry [0] is the x -> 0 limit.
struct ResolventTable {
    TimeGrid grid;
    std::vector<Side> sides;
    std::vector<std::array<double, 4>> scaled;  // row-major m x m (m <= 2)
    double inversion_error = 0.0;               // max node disagreement, N = 32 vs 64

    int m() const noexcept { return static_cast<int>(sides.size()); }
    double at(int i, int a, int c) const { return scaled[i][a * m() + c]; }
};

ResolventTable resolvent_table(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid);

// c(x_i) = int_0^{x_i} a(x_i - s) b(s) / sqrt(s (x_i - s)) ds for grid samples a, b (product integration,
// a b interpolated linearly in s). At x = 0 the limit pi a(0) b(0) is returned.
std::vector<double> singular_convolution(const std::vector<double>& a, const std::vector<double>& b, double h);

// f = H Psi(0+) + H * Psi' for one constant barrier under GBM.
DeltaProfile solve_constant_single(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid);
// Same for two constant barriers; H from numerical inversion of the 2x2 transform matrix.
DeltaProfile solve_constant_double(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid);
DeltaProfile solve_laplace(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid);

// ---------------------------------------------------------------------------

template <class F>
double talbot_inverse(F&& transform, double t, int nodes) {
    // s(theta) = (N/t)(0.5017 theta cot(0.6407 theta) - 0.6122 + 0.2645 i theta), midpoint rule on (0, pi)
    // using conjugate symmetry.
    const double pi = 3.141592653589793;
    double sum = 0.0;
    for (int k = 0; k < nodes / 2; ++k) {
        const double th = (k + 0.5) * 2.0 * pi / nodes;
        const double c = 0.6407 * th;
        const double cot = std::cos(c) / std::sin(c);
        const std::complex<double> s(nodes / t * (0.5017 * th * cot - 0.6122), nodes / t * 0.2645 * th);
        const double sn = std::sin(c);
        const std::complex<double> ds(nodes / t * (0.5017 * cot - 0.5017 * c / (sn * sn)), nodes / t * 0.2645);
        sum += (std::exp(s * t) * transform(s) * ds).imag();
    }
    // (1 / (2 pi i)) * 2 Re(sum_k e^{st} F s' dtheta) with dtheta = 2 pi / N -> (2/N) Im(...).
    return 2.0 * sum / nodes;
}

} // namespace lvb
