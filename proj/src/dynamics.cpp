#include "blochsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace blochsim {

namespace {

double clamp_z(double z) { return std::clamp(z, -1.0, 1.0); }

// Sampled check of the custom-profile requirements: even in z, zero at the
// poles, positive inside.
void validate_even_profile(const std::function<double(double)>& f) {
    constexpr int kGrid = 1001;
    double scale = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        const double z = -1.0 + 2.0 * i / (kGrid - 1);
        scale = std::max(scale, std::abs(f(z)));
    }
    if (!(scale > 0.0))
        throw std::invalid_argument("AlphaModel: custom profile is identically zero");
    const double tol = 1e-9 * scale;
    if (std::abs(f(1.0)) > tol || std::abs(f(-1.0)) > tol)
        throw std::invalid_argument("AlphaModel: custom profile must vanish at the poles");
    for (int i = 0; i < kGrid; ++i) {
        const double z = -1.0 + 2.0 * i / (kGrid - 1);
        if (std::abs(f(z) - f(-z)) > tol)
            throw std::invalid_argument("AlphaModel: custom profile must be even in z");
        if (i > 0 && i < kGrid - 1 && !(f(z) > 0.0))
            throw std::invalid_argument("AlphaModel: custom profile must be positive for |z| < 1");
    }
}

}  // namespace

AlphaModel AlphaModel::constant(double alpha0) {
    return AlphaModel(Kind::constant, alpha0, nullptr);
}

AlphaModel AlphaModel::polynomial_even(double alpha0) {
    return AlphaModel(Kind::polynomial_even, alpha0, nullptr);
}

AlphaModel AlphaModel::custom_even(std::function<double(double)> profile) {
    if (!profile) throw std::invalid_argument("AlphaModel: null profile");
    validate_even_profile(profile);
    return AlphaModel(Kind::custom_even, 0.0, std::move(profile));
}

double AlphaModel::eval(double z) const {
    const double zc = clamp_z(z);
    switch (kind_) {
        case Kind::constant: return alpha0_;
        case Kind::polynomial_even: return alpha0_ * (1.0 - zc * zc);
        case Kind::custom_even: return profile_(zc);
    }
    return 0.0;  // unreachable
}

std::string AlphaModel::name() const {
    switch (kind_) {
        case Kind::constant: return "constant";
        case Kind::polynomial_even: return "polynomial_even";
        case Kind::custom_even: return "custom_even";
    }
    return {};
}

double eval_alpha(const AlphaModel& model, double z) { return model.eval(z); }

std::array<double, 3> ito_drift(const BlochVector& b, const AlphaModel& model, double beta) {
    const double a = model.eval(b.z);
    const double b2 = beta * beta;
    return {-2.0 * b2 * b.x, -2.0 * b2 * b.y - 2.0 * a * b.z, 2.0 * a * b.y};
}

std::array<double, 3> ito_diffusion(const BlochVector& b, double beta) {
    return {-2.0 * beta * b.y, 2.0 * beta * b.x, 0.0};
}

DriftDiffusion ito_fields(const BlochVector& b, const AlphaModel& model, double beta) {
    return DriftDiffusion{ito_drift(b, model, beta), ito_diffusion(b, beta)};
}

}  // namespace blochsim
