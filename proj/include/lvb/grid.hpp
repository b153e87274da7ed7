#pragma once

#include <vector>

namespace lvb {

// Uniform grid t_0 = 0 < t_1 < ... < t_n = T.
class TimeGrid {
public:
    TimeGrid(double maturity, int n);

    int n() const noexcept { return n_; }
    double maturity() const noexcept { return maturity_; }
    double step() const noexcept { return maturity_ / n_; }
    double node(int i) const noexcept { return i == n_ ? maturity_ : maturity_ * i / n_; }
    std::vector<double> nodes() const;

    bool operator==(const TimeGrid& o) const noexcept { return n_ == o.n_ && maturity_ == o.maturity_; }

private:
    double maturity_;
    int n_;
};

} // namespace lvb
