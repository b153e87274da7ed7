#include "doctest.h"

#include "lvb/error.hpp"
#include "lvb/model.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace lvb;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

// Composite Simpson on [a, b] in log y; enough for the smooth densities below.
template <class F>
double simpson_log(F&& f, double a, double b, int n) {
    const double la = std::log(a), lb = std::log(b), h = (lb - la) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = la + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * f(std::exp(u)) * std::exp(u);
    }
    return s * h / 3.0;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InversionUnstable;
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("local_vol") {
    const Diffusion g = Diffusion::gbm(0.0, 0.2);
    const Diffusion c = Diffusion::cev(0.0, 0.2, 0.5);
    CHECK(local_vol(g, 1.0) == 0.2);
    CHECK(local_vol(g, 123.4) == 0.2);
    CHECK(local_vol(c, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(local_vol(c, 4.0) == doctest::Approx(0.1).epsilon(1e-15));
    for (double x = 0.01; x < 1e4; x *= 1.7) CHECK(local_vol(c, x) > 0.0);
    CHECK(code_of([&] { local_vol(c, 0.0); }) == ErrorCode::Domain);
    CHECK(code_of([&] { local_vol(g, -1.0); }) == ErrorCode::Domain);
}

TEST_CASE("model parameter checks") {
    CHECK(code_of([] { Diffusion::gbm(0.0, 0.0); }) == ErrorCode::Domain);
    CHECK(code_of([] { Diffusion::cev(0.0, 0.2, 1.0); }) == ErrorCode::Domain);
    CHECK(code_of([] { Diffusion::cev(0.0, -0.2, 0.5); }) == ErrorCode::Domain);
}

TEST_CASE("GBM kernel formula") {
    const double mu = 0.03, s = 0.25;
    const Diffusion g = Diffusion::gbm(mu, s);
    for (double t : {0.01, 0.5, 2.0})
        for (double y : {70.0, 100.0, 130.0}) {
            const double z = std::log(y / 100.0) - (mu - 0.5 * s * s) * t;
            const double expect = y * s / std::sqrt(2 * M_PI * t) * std::exp(-z * z / (2 * s * s * t));
            CHECK(kernel_q(g, t, 100.0, y) == doctest::Approx(expect).epsilon(1e-14));
        }
    CHECK(kernel_q(Diffusion::gbm(0.0, 0.2), 1e12, 100.0, 100.0) < 1e-5);
    CHECK(code_of([&] { kernel_q(g, 0.0, 100.0, 100.0); }) == ErrorCode::Domain);
    CHECK(code_of([&] { kernel_q(g, 1.0, -1.0, 100.0); }) == ErrorCode::Domain);
}

TEST_CASE("diagonal limit of sqrt(t) q_t(b, b)") {
    for (const Diffusion& m : {Diffusion::gbm(0.0, 0.2), Diffusion::gbm(0.05, 0.4)}) {
        for (double b : {50.0, 100.0}) {
            const double lim = b * local_vol(m, b) / kSqrt2Pi;
            CHECK(std::sqrt(1e-10) * kernel_q(m, 1e-10, b, b) == doctest::Approx(lim).epsilon(1e-6));
            CHECK(kernel_diag(m, b) == doctest::Approx(lim).epsilon(1e-15));
        }
    }
    CHECK(kernel_diag(Diffusion::gbm(0.0, 0.2), 100.0) == doctest::Approx(7.97884560803).epsilon(1e-11));
    const Diffusion c = Diffusion::cev(0.0, 0.2, 0.5);
    CHECK(kernel_diag(c, 100.0) == doctest::Approx(100.0 * 0.02 / kSqrt2Pi).epsilon(1e-14));
    // Richardson extrapolation of sqrt(s) q_s(b, b) to s = 0.
    const double s = 1e-6;
    const double e1 = std::sqrt(s) * kernel_q(c, s, 100.0, 100.0);
    const double e2 = std::sqrt(s / 2) * kernel_q(c, s / 2, 100.0, 100.0);
    CHECK(2 * e2 - e1 == doctest::Approx(kernel_diag(c, 100.0)).epsilon(1e-4));
    CHECK(kernel_diag(c, 400.0) / kernel_diag(c, 100.0) == doctest::Approx(abs_vol(c, 400.0) / abs_vol(c, 100.0)));
    CHECK(code_of([&] { kernel_diag(c, 0.0); }) == ErrorCode::Domain);
}

TEST_CASE("CEV kernel against an independent evaluation") {
    // Bessel-form density evaluated in extended precision.
    CHECK(kernel_q(Diffusion::cev(0.02, 0.2, 0.5), 0.5, 100.0, 100.0) ==
          doctest::Approx(0.87876472836538623).epsilon(1e-10));
    CHECK(kernel_q(Diffusion::cev(0.0, 2.0, 0.5), 1.0, 100.0, 90.0) ==
          doctest::Approx(6.7856462883562328).epsilon(1e-10));
    CHECK(kernel_q(Diffusion::cev(0.03, 2.0, 0.5), 0.25, 100.0, 120.0) ==
          doctest::Approx(3.1255800099945717).epsilon(1e-10));
}

TEST_CASE("CEV kernel against the forward equation") {
    // Explicit finite differences for p_t = 1/2 (s(y)^2 p)_yy - (mu y p)_y, absorbing at 0,
    // started from a narrow Gaussian; compared at t = 0.5 for sigma0 = 0.2, rho = 0.5, mu = 0.02.
    const double mu = 0.02, s0 = 0.2, rho = 0.5, x0 = 100.0, T = 0.5;
    const Diffusion c = Diffusion::cev(mu, s0, rho);
    const double lo = 94.0, hi = 106.0;
    const int N = 600;
    const double dy = (hi - lo) / N;
    const double t0 = 0.02;
    std::vector<double> p(N + 1), next(N + 1);
    for (int i = 0; i <= N; ++i) p[i] = transition_density(c, t0, x0, lo + i * dy);
    const auto a = [&](double y) { return 0.5 * s0 * s0 * std::pow(y, 2 * rho); };
    const double dt = 0.2 * dy * dy / a(hi);
    double t = t0;
    while (t < T - 1e-12) {
        const double step = std::min(dt, T - t);
        for (int i = 1; i < N; ++i) {
            const double y = lo + i * dy;
            const double diff = (a(y + dy) * p[i + 1] - 2 * a(y) * p[i] + a(y - dy) * p[i - 1]) / (dy * dy);
            const double adv = (mu * (y + dy) * p[i + 1] - mu * (y - dy) * p[i - 1]) / (2 * dy);
            next[i] = p[i] + step * (diff - adv);
        }
        next[0] = transition_density(c, t + step, x0, lo);
        next[N] = transition_density(c, t + step, x0, hi);
        p.swap(next);
        t += step;
    }
    const int mid = N / 2;
    const double q_fd = p[mid] * std::pow(abs_vol(c, 100.0), 2);
    CHECK(kernel_q(c, T, x0, 100.0) == doctest::Approx(q_fd).epsilon(1e-3));
}

TEST_CASE("dkernel_dx") {
    const Diffusion g = Diffusion::gbm(0.0, 0.2);
    const double e = 1e-4;
    const double fd = (kernel_q(g, 1.0, 90.0 + e, 100.0) - kernel_q(g, 1.0, 90.0 - e, 100.0)) / (2 * e);
    CHECK(dkernel_dx(g, 1.0, 90.0, 100.0) == doctest::Approx(fd).epsilon(1e-6));
    const double s = 0.3;
    const Diffusion h = Diffusion::gbm(0.5 * s * s, s);
    CHECK(std::fabs(dkernel_dx(h, 0.7, 100.0, 100.0)) < 1e-15);

    const Diffusion c = Diffusion::cev(0.01, 2.0, 0.5);
    for (double x : {80.0, 100.0, 120.0}) {
        const double d = 1e-2;
        const auto q = [&](double xx) { return kernel_q(c, 0.5, xx, 100.0); };
        const double fd5 = (-q(x + 2 * d) + 8 * q(x + d) - 8 * q(x - d) + q(x - 2 * d)) / (12 * d);
        CHECK(dkernel_dx(c, 0.5, x, 100.0) == doctest::Approx(fd5).epsilon(1e-4));
    }
}

TEST_CASE("sqrt(t) q_t stays bounded on [50, 200]") {
    for (const Diffusion& m : {Diffusion::gbm(0.02, 0.3), Diffusion::cev(0.02, 3.0, 0.5)}) {
        double worst = 0.0;
        for (double t = 1.0; t > 1e-7; t *= 0.7)
            for (double x = 50.0; x <= 200.0; x += 7.5)
                for (double y = 50.0; y <= 200.0; y += 7.5) {
                    const double r = std::sqrt(t) * kernel_q(m, t, x, y) / kernel_diag(m, y);
                    worst = std::max(worst, r);
                }
        CHECK(worst <= 1.5);
    }
}

TEST_CASE("GBM density has unit mass") {
    const Diffusion g = Diffusion::gbm(0.04, 0.3);
    for (double t : {0.1, 1.0}) {
        const double m = simpson_log([&](double y) { return transition_density(g, t, 100.0, y); }, 100.0 * std::exp(-12 * 0.3 * std::sqrt(t)),
                                     100.0 * std::exp(12 * 0.3 * std::sqrt(t)), 4000);
        CHECK(m == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("CEV density loses mass to absorption") {
    const Diffusion c = Diffusion::cev(0.0, 2.0, 0.5);
    const auto mass = [&](double x, double t) {
        return simpson_log([&](double y) { return transition_density(c, t, x, y); }, 1e-8, 40.0 * x + 400.0, 20000);
    };
    CHECK(mass(100.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    const double m5 = mass(5.0, 1.0);
    CHECK(m5 < 1.0);
    CHECK(m5 == doctest::Approx(0.917915001376101).epsilon(1e-6));
}

TEST_CASE("CEV density matches a Monte Carlo histogram") {
    const double mu = 0.0, s0 = 2.0, rho = 0.5, x0 = 100.0, T = 0.5;
    const Diffusion c = Diffusion::cev(mu, s0, rho);
    const int paths = 40000, steps = 500;
    const double dt = T / steps;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z;
    const std::vector<double> edges = {70, 80, 85, 90, 95, 100, 105, 110, 115, 120, 130};
    std::vector<int> counts(edges.size() - 1, 0);
    for (int p = 0; p < paths; ++p) {
        double s = x0;
        for (int i = 0; i < steps && s > 0.0; ++i) s = std::max(0.0, s + mu * s * dt + s0 * std::pow(s, rho) * std::sqrt(dt) * z(rng));
        for (std::size_t b = 0; b + 1 < edges.size(); ++b)
            if (s >= edges[b] && s < edges[b + 1]) ++counts[b];
    }
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        const double prob = simpson_log([&](double y) { return transition_density(c, T, x0, y); }, edges[b], edges[b + 1], 200);
        const double freq = static_cast<double>(counts[b]) / paths;
        const double se = std::sqrt(prob * (1 - prob) / paths);
        CHECK(std::fabs(freq - prob) <= 3 * se);
    }
}

}
