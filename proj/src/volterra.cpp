#include "lvb/volterra.hpp"

#include "lvb/error.hpp"
#include "lvb/european.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lvb {

namespace {

constexpr double kPivotFloor = 1e-14;

double side_sign(Side s) { return s == Side::Lower ? 1.0 : -1.0; }

// K_{a,c}(y, x) = s_c q_{y-x}(b_a(T-y), b_c(T-x)) / 2 and its regularised same-side form.
class Kernel {
public:
    Kernel(const Diffusion& model, const BarrierContract& contract)
        : model_(model), contract_(contract), T_(contract.maturity) {}

    double full(Side a, Side c, double y, double lag) const {
        if (!(lag > kTinyLag * T_)) return 0.0;
        const double from = contract_.barrier(a).value(T_ - y);
        const double to = contract_.barrier(c).value(T_ - y + lag);
        return 0.5 * side_sign(c) * kernel_q(model_, lag, from, to);
    }

    // sqrt(y - x) K_{a,a}(y, x), continuous up to the diagonal.
    double regular(Side a, double y, double lag) const {
        if (!(lag > kTinyLag * T_)) return diag(a, y);
        return std::sqrt(lag) * full(a, a, y, lag);
    }

    double diag(Side a, double y) const {
        return 0.5 * side_sign(a) * kernel_diag(model_, contract_.barrier(a).value(T_ - y));
    }

private:
    static constexpr double kTinyLag = 1e-13;
    const Diffusion& model_;
    const BarrierContract& contract_;
    double T_;
};

// Coefficients of f at x_j = j step, j = 0..count, in the equation at y = count step for barrier a.
// Output is indexed j * m + c.
std::vector<double> row_coefficients(const Kernel& k, const std::vector<Side>& sides, Side a, double step,
                                     int count) {
    const int m = static_cast<int>(sides.size());
    const double y = count * step;
    std::vector<double> out((count + 1) * m, 0.0);
    for (int ci = 0; ci < m; ++ci) {
        const Side c = sides[ci];
        if (c == a) {
            for (int lag = 1; lag <= count; ++lag) {
                const auto [w_far, w_near] = abel_panel_weights(lag, step);
                const int j_far = count - lag;
                out[j_far * m + ci] += w_far * k.regular(a, y, lag * step);
                out[(j_far + 1) * m + ci] += w_near * k.regular(a, y, (lag - 1) * step);
            }
        } else {
            for (int j = 0; j < count; ++j) {
                const double w = (j == 0 ? 0.5 : 1.0) * step;
                out[j * m + ci] += w * k.full(a, c, y, (count - j) * step);
            }
        }
    }
    return out;
}

// Integral over (0, y) of K_{a,c}(y, x) / sqrt(x).
double singular_response(const Kernel& k, Side a, Side c, double y) {
    if (a == c) {
        const auto f = [&](double th) {
            const double cs = std::cos(th);
            return 2.0 * k.regular(a, y, y * cs * cs);
        };
        return detail::integrate(f, 0.0, 0.5 * std::numbers::pi, 1e-11, 1e-15, "singular response");
    }
    const auto f = [&](double s) { return 2.0 * k.full(a, c, y, y - s * s); };
    return detail::integrate(f, 0.0, std::sqrt(y), 1e-11, 1e-15, "singular response");
}

// Gaussian elimination with partial pivoting on a small dense system, in place.
void dense_solve(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
        LVB_REQUIRE(std::fabs(A[piv * n + col]) >= kPivotFloor, ErrorCode::SingularDiagonal,
                    "vanishing pivot in the Volterra start block");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
        b[r] = s / A[r * n + r];
    }
}

double equation_point(const TimeGrid& g, int e) { return e == 0 ? 0.5 * g.step() : e * g.step(); }

} // namespace

const BarrierDeltas& DeltaProfile::side(Side s) const {
    const auto& d = s == Side::Lower ? lower : upper;
    LVB_REQUIRE(d.has_value(), ErrorCode::ProfileMismatch, "profile has no deltas for that barrier");
    return *d;
}

bool DeltaProfile::near_expiry_unreliable() const noexcept {
    return (upper && upper->near_expiry_unreliable) || (lower && lower->near_expiry_unreliable);
}

int DeltaProfile::sign_violations() const noexcept {
    return (upper ? upper->sign_violations : 0) + (lower ? lower->sign_violations : 0);
}

double KernelSystem::weight(int row, int col) const {
    const auto& r = rows_.at(row);
    return col < static_cast<int>(r.size()) ? r[col] : 0.0;
}

std::pair<double, double> abel_panel_weights(int lag, double h) {
    if (lag == 1) {
        const double sh = std::sqrt(h);
        return {2.0 / 3.0 * sh, 4.0 / 3.0 * sh};
    }
    const double ra = std::sqrt((lag - 1) * h);
    const double rb = std::sqrt(lag * h);
    const double m0 = 2.0 * h / (ra + rb);
    const double far = 2.0 / 3.0 * (h + ra * h / (ra + rb)) / (ra + rb);
    return {far, m0 - far};
}

void annotate_deltas(BarrierDeltas& d, Side s, double psi_scale) {
    const double tol = 1e-6 * psi_scale;
    d.sign_violations = 0;
    for (double v : d.values)
        if ((s == Side::Lower && v < -tol) || (s == Side::Upper && v > tol)) ++d.sign_violations;
    const std::size_t n = d.values.size() - 1;
    const double v0 = std::fabs(d.values[n - 2]), v1 = std::fabs(d.values[n - 1]), v2 = std::fabs(d.values[n]);
    d.near_expiry_unreliable = d.singular != 0.0 || (v1 > 1.5 * v0 && v2 > 1.5 * v1);
}

void check_drift(const Diffusion& model, const BarrierContract& contract) {
    const double mu = contract.drift();
    LVB_REQUIRE(std::fabs(model.drift() - mu) <= 1e-12 * std::max(1.0, std::fabs(mu)), ErrorCode::InvalidContract,
                "model drift must equal rate - dividend");
}

KernelSystem assemble(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                      std::vector<Side> sides, const VolterraOptions& opts) {
    validate(contract);
    check_drift(model, contract);
    LVB_REQUIRE(grid.maturity() == contract.maturity, ErrorCode::ProfileMismatch, "grid maturity differs from T");
    LVB_REQUIRE(!sides.empty() && sides.size() <= 2, ErrorCode::InvalidContract, "one or two barriers expected");
    for (Side s : sides) LVB_REQUIRE(contract.has(s), ErrorCode::InvalidContract, "contract lacks that barrier");

    KernelSystem sys(model, contract, grid, std::move(sides), opts);
    const int n = grid.n();
    const int m = sys.m();
    const double h = grid.step();
    const double T = contract.maturity;
    const Kernel k(sys.model_, sys.contract_);
    const EuropeanValuator euro(model, contract);

    sys.rows_.resize((n + 1) * m);
    sys.rhs_.resize((n + 1) * m);
    sys.psi_.resize((n + 1) * m);
    sys.singular_.assign(m, 0.0);

    double scale = 0.0;
    for (int e = 0; e <= n; ++e) {
        const double y = equation_point(grid, e);
        for (int ai = 0; ai < m; ++ai) {
            const Side a = sys.sides_[ai];
            const double psi = euro.value(T - y, contract.barrier(a).value(T - y));
            sys.psi_[e * m + ai] = psi;
            scale = std::max(scale, std::fabs(psi));
        }
    }
    if (opts.singular_split) {
        for (int ai = 0; ai < m; ++ai) {
            const Side a = sys.sides_[ai];
            const double psi0 = 0.5 * contract.payoff(contract.barrier(a).value(T));
            if (std::fabs(psi0) > 1e-12 * std::max(1.0, scale))
                sys.singular_[ai] = psi0 / (std::numbers::pi * k.diag(a, 0.0));
        }
    }

    try {
        for (int e = 0; e <= n; ++e) {
            const double y = equation_point(grid, e);
            for (int ai = 0; ai < m; ++ai) {
                const Side a = sys.sides_[ai];
                const int r = e * m + ai;
                if (e == 0) {
                    // f is linear on [0, h], so f(h/2) = (f_0 + f_1)/2.
                    const auto half = row_coefficients(k, sys.sides_, a, 0.5 * h, 1);
                    std::vector<double> row(2 * m, 0.0);
                    for (int ci = 0; ci < m; ++ci) {
                        row[ci] = half[ci] + 0.5 * half[m + ci];
                        row[m + ci] = 0.5 * half[m + ci];
                    }
                    sys.rows_[r] = std::move(row);
                } else {
                    sys.rows_[r] = row_coefficients(k, sys.sides_, a, h, e);
                }
                double rhs = sys.psi_[r];
                for (int ci = 0; ci < m; ++ci)
                    if (sys.singular_[ci] != 0.0)
                        rhs -= sys.singular_[ci] * singular_response(k, a, sys.sides_[ci], y);
                sys.rhs_[r] = rhs;
            }
        }
    } catch (const Error& err) {
        if (err.code() == ErrorCode::QuadratureFailure) throw;
        throw Error(ErrorCode::AssemblyFailure, err.what());
    }
    return sys;
}

KernelSystem assemble_single(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                             Side which, const VolterraOptions& opts) {
    return assemble(model, contract, grid, {which}, opts);
}

KernelSystem assemble_double(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                             const VolterraOptions& opts) {
    LVB_REQUIRE(contract.is_double(), ErrorCode::InvalidContract, "double-barrier assembly needs both barriers");
    return assemble(model, contract, grid, {Side::Upper, Side::Lower}, opts);
}

DeltaProfile solve(const KernelSystem& sys) {
    const int n = sys.grid_.n();
    const int m = sys.m();
    const double h = sys.grid_.step();
    std::vector<double> f((n + 1) * m, 0.0);

    // Leading block: equations at y = h/2 and y = h against f_0, f_1.
    {
        const int d = 2 * m;
        std::vector<double> A(d * d, 0.0);
        std::vector<double> b(d);
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) A[r * d + c] = sys.weight(r, c);
            b[r] = sys.rhs_[r];
        }
        dense_solve(A, b, d);
        std::copy(b.begin(), b.end(), f.begin());
    }
    for (int e = 2; e <= n; ++e) {
        std::vector<double> A(m * m);
        std::vector<double> b(m);
        for (int ai = 0; ai < m; ++ai) {
            const auto& row = sys.rows_[e * m + ai];
            double s = sys.rhs_[e * m + ai];
            for (int col = 0; col < e * m; ++col) s -= row[col] * f[col];
            for (int ci = 0; ci < m; ++ci) {
                A[ai * m + ci] = row[e * m + ci];
                if (ci == ai)
                    LVB_REQUIRE(std::fabs(A[ai * m + ci]) >= kPivotFloor, ErrorCode::SingularDiagonal,
                                "vanishing diagonal weight; volatility degenerate at the barrier");
            }
            b[ai] = s;
        }
        dense_solve(A, b, m);
        for (int ci = 0; ci < m; ++ci) f[e * m + ci] = b[ci];
    }

    DeltaProfile out{sys.grid_, std::nullopt, std::nullopt, 0.0, std::nullopt};
    for (double p : sys.psi_) out.psi_scale = std::max(out.psi_scale, std::fabs(p));
    for (int ci = 0; ci < m; ++ci) {
        BarrierDeltas d;
        d.singular = sys.singular_[ci];
        d.values.resize(n + 1);
        d.regular.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            const int j = n - i;
            const double reg = f[j * m + ci];
            d.regular[i] = reg;
            d.values[i] = reg + (j == 0 ? 2.0 * d.singular / std::sqrt(h) : d.singular / std::sqrt(j * h));
        }
        const Side s = sys.sides_[ci];
        annotate_deltas(d, s, out.psi_scale);
        (s == Side::Lower ? out.lower : out.upper) = std::move(d);
    }
    if (sys.opts_.compute_residual) out.residual = residual(sys.model_, sys.contract_, out);
    return out;
}

DeltaProfile solve_single(const KernelSystem& sys) {
    LVB_REQUIRE(sys.m() == 1, ErrorCode::ProfileMismatch, "single solve needs a one-barrier system");
    return solve(sys);
}

DeltaProfile solve_double(const KernelSystem& sys) {
    LVB_REQUIRE(sys.m() == 2, ErrorCode::ProfileMismatch, "double solve needs a two-barrier system");
    return solve(sys);
}

DeltaProfile solve_volterra(const Diffusion& model, const BarrierContract& contract, const TimeGrid& grid,
                            const VolterraOptions& opts) {
    if (contract.is_double()) return solve(assemble_double(model, contract, grid, opts));
    return solve(assemble_single(model, contract, grid, contract.lower ? Side::Lower : Side::Upper, opts));
}

double residual(const Diffusion& model, const BarrierContract& contract, const DeltaProfile& profile) {
    std::vector<Side> sides;
    if (profile.upper) sides.push_back(Side::Upper);
    if (profile.lower) sides.push_back(Side::Lower);
    for (Side s : sides) LVB_REQUIRE(contract.has(s), ErrorCode::ProfileMismatch, "profile and contract differ");
    const TimeGrid& g = profile.grid;
    LVB_REQUIRE(g.maturity() == contract.maturity, ErrorCode::ProfileMismatch, "profile maturity differs from T");

    const int n = g.n();
    const int m = static_cast<int>(sides.size());
    const double h = g.step();
    const double T = contract.maturity;
    const Kernel k(model, contract);
    const EuropeanValuator euro(model, contract);

    // Regular part at the half-step nodes x = k h / 2 by linear interpolation.
    const auto regular_at = [&](int ci, int fine) {
        const auto& reg = profile.side(sides[ci]).regular;
        const int j = fine / 2;
        if (fine % 2 == 0) return reg[n - j];
        return 0.5 * (reg[n - j] + reg[n - j - 1]);
    };

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const int count = 2 * i + 1;
        const double y = count * 0.5 * h;
        for (Side a : sides) {
            const auto row = row_coefficients(k, sides, a, 0.5 * h, count);
            double lhs = 0.0;
            for (int fine = 0; fine <= count; ++fine)
                for (int ci = 0; ci < m; ++ci) lhs += row[fine * m + ci] * regular_at(ci, fine);
            for (int ci = 0; ci < m; ++ci) {
                const double c = profile.side(sides[ci]).singular;
                if (c != 0.0) lhs += c * singular_response(k, a, sides[ci], y);
            }
            const double psi = euro.value(T - y, contract.barrier(a).value(T - y));
            worst = std::max(worst, std::fabs(lhs - psi));
        }
    }
    return worst;
}

Payoff smooth_payoff(const Payoff& p, int m, double lo, double hi) {
    LVB_REQUIRE(m >= 1, ErrorCode::Domain, "smoothing level must be >= 1");
    LVB_REQUIRE(lo >= 0.0 && hi > lo, ErrorCode::InvalidContract, "corridor must satisfy 0 <= lo < hi");
    const Payoff& base = p.smoothed_data() ? *p.smoothed_data()->base : p;
    const bool lo_cut = lo > 0.0;
    const bool hi_cut = std::isfinite(hi);
    LVB_REQUIRE(lo_cut || hi_cut, ErrorCode::InvalidContract, "corridor needs at least one finite end");
    const double width = lo_cut && hi_cut ? hi - lo : (lo_cut ? lo : hi);

    double sup = 0.0;
    double ramp = width / (2.0 * (m + 1));
    switch (base.kind()) {
    case Payoff::Kind::Call:
        LVB_REQUIRE(hi_cut, ErrorCode::InvalidContract, "call payoff is unbounded without an upper barrier");
        sup = std::max(hi - std::max(base.strike(), lo), 0.0);
        break;
    case Payoff::Kind::Put: sup = std::max(std::min(base.strike(), hi) - lo, 0.0); break;
    case Payoff::Kind::DoubleNoTouch: sup = 1.0; break;
    default:
        sup = base.height();
        ramp = 0.0;
        break;
    }
    const double shrink = sup > 0.0 ? std::max(0.0, 1.0 - 1.0 / (m * sup)) : 0.0;
    Payoff::SmoothedData d{std::make_shared<const Payoff>(base), m, lo, hi, ramp, width / (4.0 * m), shrink};
    return Payoff::smoothed(std::move(d));
}

Payoff smooth_payoff(const BarrierContract& contract, int m) {
    const double T = contract.maturity;
    return smooth_payoff(contract.payoff, m, contract.corridor_lo(T), contract.corridor_hi(T));
}

} // namespace lvb
