#include <doctest.h>

#include <cmath>
#include <random>

#include "blochsim/dynamics.hpp"

using namespace blochsim;

TEST_CASE("eval_alpha: built-in variants") {
    const auto poly1 = AlphaModel::polynomial_even(1.0);
    CHECK(eval_alpha(poly1, 1.0) == 0.0);   // zero at the poles
    CHECK(eval_alpha(poly1, -1.0) == 0.0);
    CHECK(eval_alpha(poly1, 0.0) == 1.0);
    CHECK(eval_alpha(AlphaModel::polynomial_even(2.0), 0.5) == doctest::Approx(1.5));

    const auto con = AlphaModel::constant(3.5);
    CHECK(eval_alpha(con, 0.0) == 3.5);
    CHECK(eval_alpha(con, 1.0) == 3.5);  // constant alpha does NOT fix the poles

    // boundary overshoot is clamped, keeping the profile nonnegative
    CHECK(eval_alpha(poly1, 1.0 + 1e-10) == 0.0);
    CHECK(eval_alpha(poly1, -1.0 - 1e-10) == 0.0);
}

TEST_CASE("eval_alpha symmetry over a z grid") {
    const auto poly = AlphaModel::polynomial_even(1.7);
    const auto custom = AlphaModel::custom_even(
        [](double z) { return (1.0 - z * z) * (1.0 - z * z); });
    for (int i = 0; i <= 1000; ++i) {
        const double z = -1.0 + 2.0 * i / 1000.0;
        CHECK(eval_alpha(poly, z) == eval_alpha(poly, -z));
        CHECK(eval_alpha(custom, z) == eval_alpha(custom, -z));
    }
}

TEST_CASE("custom profiles are validated at registration") {
    CHECK_NOTHROW(AlphaModel::custom_even([](double z) { return 2.0 * (1.0 - z * z); }));
    // odd profile
    CHECK_THROWS_AS(AlphaModel::custom_even([](double z) { return z * (1.0 - z * z); }),
                    std::invalid_argument);
    // does not vanish at the poles
    CHECK_THROWS_AS(AlphaModel::custom_even([](double) { return 1.0; }),
                    std::invalid_argument);
    // negative inside
    CHECK_THROWS_AS(AlphaModel::custom_even([](double z) { return z * z - 0.5; }),
                    std::invalid_argument);
}

TEST_CASE("ito_drift: reference points") {
    auto d = ito_drift({1.0, 0.0, 0.0}, AlphaModel::constant(1.0), 1.0);
    CHECK(d[0] == -2.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == 0.0);

    d = ito_drift({0.0, 0.0, 1.0}, AlphaModel::constant(1.0), 0.0);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == -2.0);
    CHECK(d[2] == 0.0);

    d = ito_drift({0.0, 1.0, 0.0}, AlphaModel::polynomial_even(1.0), 2.0);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == -8.0);
    CHECK(d[2] == 2.0);
}

TEST_CASE("ito_diffusion: reference points") {
    auto s = ito_diffusion({1.0, 0.0, 0.0}, 1.0);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 2.0);
    CHECK(s[2] == 0.0);

    s = ito_diffusion({0.0, 1.0, 0.0}, 1.0);
    CHECK(s[0] == -2.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 0.0);

    s = ito_diffusion({0.3, -0.4, 0.5}, 0.0);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 0.0);
}

TEST_CASE("noise generator is an infinitesimal rotation: b . diffusion = 0") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const BlochVector b{u(rng), u(rng), u(rng)};
        const double beta = 5.0 * u(rng);
        const auto s = ito_diffusion(b, beta);
        CHECK(std::abs(b.x * s[0] + b.y * s[1] + b.z * s[2]) <= 1e-15);
        CHECK(s[2] == 0.0);
    }
}

TEST_CASE("drift decomposition: b . drift = -2 beta^2 (x^2 + y^2)") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto model = AlphaModel::polynomial_even(1.3);
    for (int i = 0; i < 200; ++i) {
        const BlochVector b{u(rng), u(rng), u(rng)};
        const double beta = 3.0 * u(rng);
        const auto d = ito_drift(b, model, beta);
        const double got = b.x * d[0] + b.y * d[1] + b.z * d[2];
        const double want = -2.0 * beta * beta * (b.x * b.x + b.y * b.y);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("ito_fields bundles drift and diffusion") {
    const BlochVector b{0.2, -0.3, 0.9};
    const auto model = AlphaModel::constant(2.0);
    const auto f = ito_fields(b, model, 1.5);
    CHECK(f.drift == ito_drift(b, model, 1.5));
    CHECK(f.diffusion == ito_diffusion(b, 1.5));
}
