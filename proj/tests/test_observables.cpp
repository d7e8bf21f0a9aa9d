#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "blochsim/ensemble.hpp"
#include "blochsim/observables.hpp"

using namespace blochsim;

namespace {

Trajectory synthetic_z(double dt, std::size_t n, const std::vector<double>& zs) {
    Trajectory t;
    t.grid = TimeGrid(0.0, dt, n);
    t.states.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double z = zs[k];
        t.states[k] = BlochVector{0.0, std::sqrt(std::max(0.0, 1.0 - z * z)), z};
    }
    return t;
}

Trajectory cosine_trajectory(double omega, double dt, std::size_t n) {
    std::vector<double> zs(n + 1);
    for (std::size_t k = 0; k <= n; ++k) zs[k] = std::cos(omega * dt * static_cast<double>(k));
    return synthetic_z(dt, n, zs);
}

}  // namespace

TEST_CASE("localization_average: constant z = 1") {
    const Trajectory t = synthetic_z(0.1, 50, std::vector<double>(51, 1.0));
    const auto L = localization_average(t);
    REQUIRE(L.values.size() == 51);
    for (double v : L.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("localization_average: z = cos(2s) tends to 1/2") {
    // (1/t) integral of cos^2 = 1/2 + sin(4t)/(8t)
    const auto t = cosine_trajectory(2.0, 1e-3, 100000);  // t_max = 100
    const auto L = localization_average(t);
    CHECK(L.values.back() == doctest::Approx(0.5).epsilon(4e-3));
    CHECK(L.values.front() == 1.0);  // z(0)^2
    for (double v : L.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("localization_average is nondecreasing when z^2 is nondecreasing") {
    std::vector<double> zs(201);
    for (std::size_t k = 0; k <= 200; ++k) zs[k] = static_cast<double>(k) / 200.0;
    const auto L = localization_average(synthetic_z(0.05, 200, zs));
    for (std::size_t k = 1; k < L.values.size(); ++k)
        CHECK(L.values[k] >= L.values[k - 1] - 1e-15);
}

TEST_CASE("pole_occupancy: frozen cosine fraction") {
    // dense-sampling oracle for |cos| > 0.9: (2/pi) arccos(0.9)
    const auto t = cosine_trajectory(2.0, 1e-4, 10 * 31416);  // ten periods
    const double occ = pole_occupancy(t, 0.9);
    CHECK(occ == doctest::Approx(0.287132586257413).epsilon(2e-3));

    double oracle = 0.0;
    const std::size_t dense = 1000000;
    for (std::size_t k = 0; k < dense; ++k) {
        const double z = std::cos(2.0 * std::numbers::pi * k / static_cast<double>(dense));
        if (z * z > 0.81) oracle += 1.0;
    }
    oracle /= static_cast<double>(dense);
    CHECK(occ == doctest::Approx(oracle).epsilon(2e-3));

    const Trajectory ones = synthetic_z(0.1, 20, std::vector<double>(21, 1.0));
    CHECK(pole_occupancy(ones, 0.9) == 1.0);
    CHECK_THROWS_AS(pole_occupancy(ones, 1.5), std::invalid_argument);
}

TEST_CASE("pole_occupancy: linear model stays near the uniform-sphere baseline") {
    // constant alpha keeps the state wandering; P(|z| > 0.9) = 0.1 for the
    // uniform sphere measure
    const TimeGrid grid(0.0, 1e-2, 100000);
    const auto noise = brownian_path(3, grid.dt, grid.n_steps);
    const auto traj = integrate_path({1.0, 0.0, 0.0}, grid, noise.increments,
                                     AlphaModel::constant(1.0), 7.0,
                                     Scheme::rotation_splitting);
    CHECK(pole_occupancy(traj, 0.9) < 0.3);
}

TEST_CASE("z_histogram: binning and validation") {
    const std::vector<double> edges{-1.0, -0.5, 0.0, 0.5, 1.0};

    std::vector<double> ones(10, 1.0);
    auto h = z_histogram(ones, edges);
    CHECK(h.total == 10);
    CHECK(h.counts == std::vector<std::uint64_t>{0, 0, 0, 10});

    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back(-1.0 + (i + 0.5) * 2e-3);
    h = z_histogram(grid, edges);
    for (auto c : h.counts) CHECK(c == 250);

    std::vector<double> bad{0.0, 1.5};
    CHECK_THROWS_AS(z_histogram(bad, edges), std::invalid_argument);
    const std::vector<double> unsorted{0.0, 0.0, 1.0};
    CHECK_THROWS_AS(z_histogram(ones, unsorted), std::invalid_argument);
}

TEST_CASE("z_histogram is permutation invariant") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> samples(2000);
    for (auto& s : samples) s = u(rng);
    std::vector<double> edges;
    for (int i = 0; i <= 40; ++i) edges.push_back(-1.0 + i * 0.05);

    const auto h1 = z_histogram(samples, edges);
    std::shuffle(samples.begin(), samples.end(), rng);
    const auto h2 = z_histogram(samples, edges);
    CHECK(h1.counts == h2.counts);
}

TEST_CASE("tail_exponent on synthetic power-law and flat samples") {
    // inverse-CDF sampling of density ~ (1-z)^{-1/2} on [1-w, 1)
    const double w = 0.5;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> samples(200000);
    for (auto& s : samples) {
        const double u = u01(rng);
        s = 1.0 - w * (1.0 - u) * (1.0 - u);
    }
    std::vector<double> edges;
    for (int i = 0; i <= 200; ++i) edges.push_back(-1.0 + i * 0.01);

    const auto fit = tail_exponent(z_histogram(samples, edges), w);
    CHECK(fit.gamma == doctest::Approx(0.5).epsilon(0.1));
    CHECK(std::abs(fit.gamma - 0.5) <= 0.05);
    CHECK(fit.bins_used >= 4);

    // flat density: gamma ~ 0
    for (auto& s : samples) s = 2.0 * u01(rng) - 1.0;
    const auto flat = tail_exponent(z_histogram(samples, edges), w);
    CHECK(std::abs(flat.gamma) <= 0.05);

    // insufficient bins in the window
    std::vector<double> low(100, -0.9);
    CHECK_THROWS_AS(tail_exponent(z_histogram(low, edges), 0.5), std::invalid_argument);
}

TEST_CASE("meridian_flux: box-kernel arithmetic and the undefined case") {
    // all samples at z = z_c with y = 0.5 and bandwidth 0.5: mass-one box
    // kernel gives 0.5 * K(0)/h = 0.5
    std::vector<BlochVector> snap(100, BlochVector{0.0, 0.5, 0.25});
    auto est = meridian_flux(snap, 0.25, 0.5);
    REQUIRE(est.has_value());
    CHECK(est->value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(est->n_in_band == 100);
    CHECK(est->std_error == doctest::Approx(0.0));

    // nothing within the band: undefined, not zero
    est = meridian_flux(snap, 0.9, 0.02);
    CHECK(!est.has_value());
}

TEST_CASE("meridian_flux is antisymmetric under y negation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<BlochVector> snap(500), flipped(500);
    for (std::size_t i = 0; i < snap.size(); ++i) {
        const BlochVector b = renormalize({u(rng), u(rng), u(rng)});
        snap[i] = b;
        flipped[i] = BlochVector{b.x, -b.y, b.z};
    }
    const auto a = meridian_flux(snap, 0.2, 0.1);
    const auto b = meridian_flux(flipped, 0.2, 0.1);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->value == -b->value);
    CHECK(a->std_error == b->std_error);

    // exactly symmetric snapshot: zero estimate
    std::vector<BlochVector> sym;
    for (const auto& s : snap) {
        sym.push_back(s);
        sym.push_back(BlochVector{s.x, -s.y, s.z});
    }
    const auto c = meridian_flux(sym, 0.2, 0.1);
    REQUIRE(c.has_value());
    CHECK(c->value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("transition_count: deterministic crossing pattern") {
    const Trajectory ones = synthetic_z(0.1, 20, std::vector<double>(21, 1.0));
    CHECK(transition_count(ones, 0.9, 0.5) == 0);

    // z = cos(0.1 s) over ten half-periods: eleven pole touches including
    // both endpoints, so one alternation per half period
    const double dt = 0.01;
    const std::size_t n = static_cast<std::size_t>(10.0 * std::numbers::pi / 0.1 / dt);
    const auto slow = cosine_trajectory(0.1, dt, n);
    CHECK(transition_count(slow, 0.9, 0.5) == 10);

    CHECK_THROWS_AS(transition_count(ones, 0.5, 0.9), std::invalid_argument);
}

TEST_CASE("transition_count is invariant under time reversal") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> step(0.0, 0.3);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> zs(401);
        double z = 0.0;
        for (auto& v : zs) {
            z = std::clamp(z + step(rng), -1.0, 1.0);
            v = z;
        }
        const auto fwd = synthetic_z(0.1, 400, zs);
        std::reverse(zs.begin(), zs.end());
        const auto rev = synthetic_z(0.1, 400, zs);
        CHECK(transition_count(fwd, 0.9, 0.5) == transition_count(rev, 0.9, 0.5));
    }
}
