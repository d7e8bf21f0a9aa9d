#include "blochsim/analytics.hpp"

#include <array>
#include <cmath>

namespace blochsim {

namespace {

constexpr double kRegimeTol = 1e-12;

// RK4 over one interval h for a 3-component linear system.
template <typename Rhs>
std::array<double, 3> rk4_step(const std::array<double, 3>& s, double h, Rhs rhs) {
    const auto k1 = rhs(s);
    std::array<double, 3> tmp;
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + h * k3[i];
    const auto k4 = rhs(tmp);
    std::array<double, 3> out;
    for (int i = 0; i < 3; ++i)
        out[i] = s[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Substep so that coarse grids keep RK4 error far below all tolerances.
int substeps_for(double dt) {
    return dt > 1e-3 ? static_cast<int>(std::ceil(dt / 1e-3)) : 1;
}

}  // namespace

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::underdamped: return "underdamped";
        case Regime::overdamped: return "overdamped";
        case Regime::critical: return "critical";
    }
    return {};
}

Regime classify_regime(double alpha, double beta) {
    if (alpha == 0.0 && beta == 0.0)
        throw std::invalid_argument("classify_regime: alpha and beta cannot both be zero");
    const double b2 = beta * beta;
    const double a2 = 2.0 * std::abs(alpha);
    if (std::abs(b2 - a2) <= kRegimeTol) return Regime::critical;
    return b2 < a2 ? Regime::underdamped : Regime::overdamped;
}

FirstMoments first_moments_closed_form(double t, const BlochVector& b0, double alpha,
                                       double beta) {
    const Regime regime = classify_regime(alpha, beta);
    if (regime == Regime::critical)
        throw std::invalid_argument(
            "first_moments_closed_form: critical regime, use first_moments_ode");

    const double b2 = beta * beta;
    const double w = std::sqrt(std::abs(b2 * b2 - 4.0 * alpha * alpha));
    const double c1 = (-b2 * b0.y - 2.0 * alpha * b0.z) / w;
    const double c2 = (b2 * b0.z + 2.0 * alpha * b0.y) / w;
    const double ex = std::exp(-2.0 * b2 * t);
    const double e = std::exp(-b2 * t);

    double cw, sw;
    if (regime == Regime::underdamped) {
        cw = std::cos(w * t);
        sw = std::sin(w * t);
    } else {
        cw = std::cosh(w * t);
        sw = std::sinh(w * t);
    }
    return FirstMoments{ex * b0.x, e * (b0.y * cw + c1 * sw), e * (b0.z * cw + c2 * sw)};
}

std::vector<FirstMoments> first_moments_ode(const TimeGrid& grid, const BlochVector& b0,
                                            double alpha, double beta) {
    const double b2 = beta * beta;
    auto rhs = [alpha, b2](const std::array<double, 3>& s) {
        return std::array<double, 3>{
            -2.0 * b2 * s[0],
            -2.0 * b2 * s[1] - 2.0 * alpha * s[2],
            2.0 * alpha * s[1],
        };
    };

    std::vector<FirstMoments> out;
    out.reserve(grid.n_points());
    std::array<double, 3> s{b0.x, b0.y, b0.z};
    out.push_back(FirstMoments{s[0], s[1], s[2]});
    const int sub = substeps_for(grid.dt);
    const double h = grid.dt / sub;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        for (int j = 0; j < sub; ++j) s = rk4_step(s, h, rhs);
        out.push_back(FirstMoments{s[0], s[1], s[2]});
    }
    return out;
}

std::vector<SecondMoments> second_moments_ode(const TimeGrid& grid, const SecondMoments& init,
                                              double alpha, double beta) {
    if (init.zz < 0.0 || init.zz > 1.0 || init.yy < 0.0 || init.yy > 1.0 ||
        init.xx() < 0.0 || init.xx() > 1.0 || init.yz * init.yz > init.yy * init.zz + kPhysTol)
        throw std::invalid_argument("second_moments_ode: initial moments violate invariants");

    const double b2 = beta * beta;
    // state = (zz, yy, yz), with xx = 1 - yy - zz substituted
    auto rhs = [alpha, b2](const std::array<double, 3>& s) {
        const double xx = 1.0 - s[1] - s[0];
        return std::array<double, 3>{
            4.0 * alpha * s[2],
            -4.0 * alpha * s[2] - 4.0 * b2 * s[1] + 4.0 * b2 * xx,
            -2.0 * b2 * s[2] + 2.0 * alpha * s[1] - 2.0 * alpha * s[0],
        };
    };

    std::vector<SecondMoments> out;
    out.reserve(grid.n_points());
    std::array<double, 3> s{init.zz, init.yy, init.yz};
    out.push_back(SecondMoments{s[0], s[1], s[2]});
    const int sub = substeps_for(grid.dt);
    const double h = grid.dt / sub;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        for (int j = 0; j < sub; ++j) s = rk4_step(s, h, rhs);
        out.push_back(SecondMoments{s[0], s[1], s[2]});
    }
    return out;
}

SecondMoments stationary_second_moments() {
    return SecondMoments{1.0 / 3.0, 1.0 / 3.0, 0.0};
}

double slow_relaxation_rate(double alpha, double beta) {
    if (classify_regime(alpha, beta) == Regime::underdamped)
        throw std::invalid_argument("slow_relaxation_rate: requires beta^2 >= 2|alpha|");
    const double b2 = beta * beta;
    const double disc = b2 * b2 - 4.0 * alpha * alpha;
    return b2 - std::sqrt(std::max(disc, 0.0));
}

DensityMatrix decoherence_limit() {
    return density_from_bloch(BlochVector{0.0, 0.0, 0.0});
}

}  // namespace blochsim
