#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "blochsim/ensemble.hpp"
#include "blochsim/integrators.hpp"

using namespace blochsim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("renormalize") {
    auto b = renormalize({0.0, 0.0, 2.0});
    CHECK(b == BlochVector{0.0, 0.0, 1.0});
    b = renormalize({3.0, 4.0, 0.0});
    CHECK(b.x == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(b.y == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(renormalize({0.0, 0.0, 0.0}), degenerate_state_error);
}

TEST_CASE("step_euler_maruyama: single-step arithmetic") {
    // drift only: dy = -2 alpha z dt
    auto b = step_euler_maruyama({0.0, 0.0, 1.0}, 0.01, 0.0, AlphaModel::constant(1.0), 7.0);
    const double k1 = 1.0 / std::sqrt(1.0 + 0.02 * 0.02);
    CHECK(b.x == 0.0);
    CHECK(b.y == doctest::Approx(-0.02 * k1).epsilon(1e-12));
    CHECK(b.z == doctest::Approx(k1).epsilon(1e-12));
    CHECK(b.y == doctest::Approx(-0.019996).epsilon(1e-4));
    CHECK(b.z == doctest::Approx(0.999800).epsilon(1e-4));

    // drift contraction plus noise kick
    b = step_euler_maruyama({1.0, 0.0, 0.0}, 0.01, 0.1, AlphaModel::constant(0.0), 1.0);
    const double k = 1.0 / std::sqrt(0.98 * 0.98 + 0.2 * 0.2);
    CHECK(b.x == doctest::Approx(0.98 * k).epsilon(1e-12));
    CHECK(b.y == doctest::Approx(0.2 * k).epsilon(1e-12));
    CHECK(b.z == 0.0);

    // norm is exact after every step
    CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("step_euler_maruyama: pole is fixed when alpha vanishes there") {
    const auto poly = AlphaModel::polynomial_even(1.0);
    for (double dW : {0.0, 0.3, -2.0}) {
        const auto b = step_euler_maruyama({0.0, 0.0, 1.0}, 0.01, dW, poly, 7.0);
        CHECK(b.x == 0.0);
        CHECK(b.y == 0.0);
        CHECK(b.z == 1.0);
    }
}

TEST_CASE("step_rotation_splitting: exact rotations") {
    // quarter turn about x
    auto b = step_rotation_splitting({0.0, 1.0, 0.0}, 1.0, 0.0, AlphaModel::constant(kPi / 4), 0.0);
    CHECK(b.x == doctest::Approx(0.0));
    CHECK(b.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(b.z == doctest::Approx(1.0).epsilon(1e-15));

    // rotation about z by 2 beta dW = pi/2
    b = step_rotation_splitting({1.0, 0.0, 0.0}, 0.01, kPi / 4, AlphaModel::constant(0.0), 1.0);
    CHECK(b.x == doctest::Approx(0.0));
    CHECK(b.y == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.z == 0.0);

    // poles are fixed points of the nonlinear model
    const auto poly = AlphaModel::polynomial_even(1.0);
    for (double dW : {0.0, 1.3, -0.7}) {
        b = step_rotation_splitting({0.0, 0.0, 1.0}, 0.01, dW, poly, 7.0);
        CHECK(b.x == 0.0);
        CHECK(b.y == 0.0);
        CHECK(b.z == 1.0);
    }
}

TEST_CASE("integrate_path: zero-noise rotation against the exact solution") {
    // z(t) = z0 cos(2 a t) + y0 sin(2 a t), period pi/alpha
    const double alpha = 1.0, dt = 1e-3;
    const TimeGrid grid(0.0, dt, 3142);  // one period and a bit
    const std::vector<double> no_noise(grid.n_steps, 0.0);
    const BlochVector b0{0.0, 0.3, std::sqrt(1.0 - 0.09)};
    const auto model = AlphaModel::constant(alpha);

    auto check = [&](Scheme s, double tol) {
        const auto traj = integrate_path(b0, grid, no_noise, model, 0.0, s);
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            const double t = grid.time(k);
            const double want = b0.z * std::cos(2 * alpha * t) + b0.y * std::sin(2 * alpha * t);
            worst = std::max(worst, std::abs(traj.states[k].z - want));
        }
        CHECK(worst <= tol);
    };
    check(Scheme::rotation_splitting, 1e-12);
    check(Scheme::euler_maruyama_renorm, 10.0 * dt);  // first order in dt
}

TEST_CASE("integrate_path: nonlinear noiseless motion conserves x") {
    // rotation splitting never touches x when beta = 0
    const TimeGrid grid(0.0, 1e-3, 10000);
    const std::vector<double> no_noise(grid.n_steps, 0.0);
    const BlochVector b0{0.5, 0.0, std::sqrt(0.75)};
    const auto traj = integrate_path(b0, grid, no_noise, AlphaModel::polynomial_even(1.0), 0.0,
                                     Scheme::rotation_splitting);
    for (const auto& s : traj.states) CHECK(std::abs(s.x - 0.5) <= 1e-6);
}

TEST_CASE("integrate_path: meridian motion is monotone toward a pole") {
    const TimeGrid grid(0.0, 1e-3, 20000);
    const std::vector<double> no_noise(grid.n_steps, 0.0);
    const BlochVector b0{0.0, 0.6, 0.8};
    for (Scheme s : {Scheme::rotation_splitting, Scheme::euler_maruyama_renorm}) {
        const auto traj =
            integrate_path(b0, grid, no_noise, AlphaModel::polynomial_even(1.0), 0.0, s);
        double prev = traj.states[0].z;
        for (const auto& st : traj.states) {
            CHECK(st.x == 0.0);          // stays on the meridian
            CHECK(st.z >= prev - 1e-15); // monotone toward z = +1
            prev = st.z;
        }
        CHECK(traj.states.back().z > 0.99);
    }
}

TEST_CASE("integrate_path: pole start of the nonlinear model never moves") {
    const TimeGrid grid(0.0, 1e-2, 500);
    const auto noise = brownian_path(42, grid.dt, grid.n_steps);
    for (double pole : {1.0, -1.0}) {
        for (Scheme s : {Scheme::rotation_splitting, Scheme::euler_maruyama_renorm}) {
            const auto traj = integrate_path({0.0, 0.0, pole}, grid, noise.increments,
                                             AlphaModel::polynomial_even(1.0), 7.0, s);
            for (const auto& st : traj.states) {
                CHECK(st.x == 0.0);
                CHECK(st.y == 0.0);
                CHECK(st.z == pole);
            }
        }
    }
}

TEST_CASE("integrate_path: custom even profile also fixes the poles") {
    const auto quartic = AlphaModel::custom_even(
        [](double z) { return 1.5 * (1.0 - z * z) * (1.0 - z * z); });
    const TimeGrid grid(0.0, 1e-2, 300);
    const auto noise = brownian_path(19, grid.dt, grid.n_steps);
    const auto traj = integrate_path({0.0, 0.0, -1.0}, grid, noise.increments, quartic, 7.0,
                                     Scheme::rotation_splitting);
    for (const auto& s : traj.states) CHECK(s.z == -1.0);
}

TEST_CASE("integrate_path: deterministic given the same noise") {
    const TimeGrid grid(0.0, 1e-2, 300);
    const auto noise = brownian_path(7, grid.dt, grid.n_steps);
    const auto model = AlphaModel::polynomial_even(1.0);
    const auto a =
        integrate_path({1.0, 0.0, 0.0}, grid, noise.increments, model, 7.0, Scheme::rotation_splitting);
    const auto b =
        integrate_path({1.0, 0.0, 0.0}, grid, noise.increments, model, 7.0, Scheme::rotation_splitting);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k) CHECK(a.states[k] == b.states[k]);
}

TEST_CASE("rotation splitting conserves the norm over many steps") {
    const TimeGrid grid(0.0, 1e-2, 20000);
    const auto noise = brownian_path(11, grid.dt, grid.n_steps);
    const auto traj = integrate_path({1.0, 0.0, 0.0}, grid, noise.increments,
                                     AlphaModel::polynomial_even(1.0), 7.0,
                                     Scheme::rotation_splitting);
    double worst = 0.0;
    for (const auto& s : traj.states) worst = std::max(worst, std::abs(s.norm() - 1.0));
    CHECK(worst <= 1e-12);
}

TEST_CASE("schemes converge to each other as dt -> 0 (same Brownian path)") {
    // terminal discrepancy between the two schemes shrinks when dt is halved
    const double T = 2.0, alpha = 1.0, beta = 1.0;
    const auto model = AlphaModel::constant(alpha);
    double coarse_sum = 0.0, fine_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const double dt_f = 5e-3;
        const std::size_t n_f = static_cast<std::size_t>(T / dt_f);
        const auto fine = brownian_path(seed, dt_f, n_f);
        std::vector<double> coarse(n_f / 2);
        for (std::size_t k = 0; k < coarse.size(); ++k)
            coarse[k] = fine.increments[2 * k] + fine.increments[2 * k + 1];

        auto discrepancy = [&](const std::vector<double>& inc, double dt) {
            const TimeGrid g(0.0, dt, inc.size());
            const BlochVector b0{0.0, 0.0, 1.0};
            const auto em =
                integrate_path(b0, g, inc, model, beta, Scheme::euler_maruyama_renorm);
            const auto rt = integrate_path(b0, g, inc, model, beta, Scheme::rotation_splitting);
            const auto& e = em.states.back();
            const auto& r = rt.states.back();
            return std::sqrt((e.x - r.x) * (e.x - r.x) + (e.y - r.y) * (e.y - r.y) +
                             (e.z - r.z) * (e.z - r.z));
        };
        coarse_sum += discrepancy(coarse, 2 * dt_f);
        fine_sum += discrepancy(fine.increments, dt_f);
    }
    CHECK(fine_sum < coarse_sum);
}

TEST_CASE("integrate_path validates its inputs") {
    const TimeGrid grid(0.0, 1e-2, 10);
    const std::vector<double> noise(5, 0.0);  // wrong length
    CHECK_THROWS_AS(integrate_path({0.0, 0.0, 1.0}, grid, noise, AlphaModel::constant(1.0), 0.0,
                                   Scheme::rotation_splitting),
                    std::invalid_argument);
    const std::vector<double> ok(10, 0.0);
    CHECK_THROWS_AS(integrate_path({0.0, 0.0, 0.5}, grid, ok, AlphaModel::constant(1.0), 0.0,
                                   Scheme::rotation_splitting),
                    std::invalid_argument);
}

TEST_CASE("scheme names round-trip") {
    CHECK(parse_scheme("euler") == Scheme::euler_maruyama_renorm);
    CHECK(parse_scheme("rotation") == Scheme::rotation_splitting);
    CHECK(parse_scheme(scheme_name(Scheme::rotation_splitting)) == Scheme::rotation_splitting);
    CHECK_THROWS_AS(parse_scheme("verlet"), std::invalid_argument);
}
