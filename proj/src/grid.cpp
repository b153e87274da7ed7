#include "lvb/grid.hpp"

#include "lvb/error.hpp"

#include <cmath>

namespace lvb {

TimeGrid::TimeGrid(double maturity, int n) : maturity_(maturity), n_(n) {
    LVB_REQUIRE(std::isfinite(maturity) && maturity > 0.0, ErrorCode::NonpositiveMaturity, "maturity must be > 0");
    LVB_REQUIRE(n >= 2, ErrorCode::Domain, "grid needs at least 2 steps");
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> out(n_ + 1);
    for (int i = 0; i <= n_; ++i) out[i] = node(i);
    return out;
}

} // namespace lvb
