#pragma once

#include "lvb/contract.hpp"
#include "lvb/grid.hpp"
#include "lvb/model.hpp"

#include <optional>
#include <vector>

namespace lvb {

// Delta along one barrier: Delta(t) = regular(t) + singular / sqrt(T - t).
// The singular part is non-zero only when the payoff does not vanish at that barrier.
struct BarrierDeltas {
    std::vector<double> values;   // per grid node t_i; at t = T the cell average over [T - h, T]
    std::vector<double> regular;  // per grid node
    double singular = 0.0;
    bool near_expiry_unreliable = false;
    int sign_violations = 0;
};

struct DeltaProfile {
    TimeGrid grid;
    std::optional<BarrierDeltas> upper;
    std::optional<BarrierDeltas> lower;
    double psi_scale = 0.0;  // max |Psi| over the right-hand sides
    std::optional<double> residual;

    bool has(Side s) const noexcept { return s == Side::Lower ? lower.has_value() : upper.has_value(); }
    const BarrierDeltas& side(Side s) const;
    bool near_expiry_unreliable() const noexcept;
    int sign_violations() const noexcept;
};

struct VolterraOptions {
    bool singular_split = true;     // subtract the c / sqrt(T - t) expiry singularity analytically
    bool compute_residual = false;  // re-integrate the solved system at doubled resolution
};

// Discretised first-kind system in y = T - t, x = T - u.
// Equation block 0 sits at y = h/2, block e >= 1 at y = e h; unknown block j at x = j h.
// Within a block the barriers are interleaved in the order of `sides`.
class KernelSystem {
public:
    int m() const noexcept { return static_cast<int>(sides_.size()); }
    int dimension() const noexcept { return (grid_.n() + 1) * m(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<Side>& sides() const noexcept { return sides_; }

    // Coefficient of unknown `col` in equation `row`; zero above the stored band.
    double weight(int row, int col) const;
    const std::vector<double>& row(int r) const { return rows_[r]; }
    const std::vector<double>& rhs() const noexcept { return rhs_; }
    // Psi at the equation points before the singular part is removed.
    const std::vector<double>& psi() const noexcept { return psi_; }
    const std::vector<double>& singular() const noexcept { return singular_; }

private:
    friend KernelSystem assemble(const Diffusion&, const BarrierContract&, const TimeGrid&, std::vector<Side>,
                                 const VolterraOptions&);
    friend DeltaProfile solve(const KernelSystem&);

    KernelSystem(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                 std::vector<Side> sides, const VolterraOptions& opts)
        : model_(model), contract_(contract), grid_(grid), sides_(std::move(sides)), opts_(opts) {}

    Diffusion model_;
    BarrierContract contract_;
    TimeGrid grid_;
    std::vector<Side> sides_;
    VolterraOptions opts_;
    std::vector<std::vector<double>> rows_;
    std::vector<double> rhs_;
    std::vector<double> psi_;
    std::vector<double> singular_;
};

KernelSystem assemble(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                      std::vector<Side> sides, const VolterraOptions& opts = {});
KernelSystem assemble_single(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                             Side which, const VolterraOptions& opts = {});
KernelSystem assemble_double(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                             const VolterraOptions& opts = {});

// Block forward substitution. Throws SingularDiagonal on a vanishing pivot.
DeltaProfile solve(const KernelSystem& sys);
DeltaProfile solve_single(const KernelSystem& sys);
DeltaProfile solve_double(const KernelSystem& sys);

// Assemble and solve every barrier present in the contract.
DeltaProfile solve_volterra(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                            const VolterraOptions& opts = {});

// Max |Q f - Psi| at the midpoints y = (i + 1/2) h, integrated on the half-step grid.
double residual(const Diffusion& model, const BarrierContract& contract, const DeltaProfile& profile);

// Product-trapezoid weights of the hat functions against 1/sqrt(s) on [(lag-1)h, lag h]:
// first = weight of the node at s = lag h, second = node at s = (lag-1)h.
std::pair<double, double> abel_panel_weights(int lag, double h);

// C^2 approximant from below that vanishes at the corridor ends and is monotone in m.
Payoff smooth_payoff(const Payoff& p, int m, double lo, double hi);
Payoff smooth_payoff(const BarrierContract& contract, int m);

// Fills sign_violations and near_expiry_unreliable from values and singular.
void annotate_deltas(BarrierDeltas& d, Side s, double psi_scale);

// Throws InvalidContract when the model drift differs from r - delta.
void check_drift(const Diffusion& model, const BarrierContract& contract);

} // namespace lvb
