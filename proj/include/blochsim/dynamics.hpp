#pragma once

#include <array>
#include <functional>
#include <string>

#include "blochsim/core.hpp"

namespace blochsim {

// Tunnelling-amplitude model alpha(z).
//
// Built-in variants:
//   Constant        alpha(z) = alpha0 (does not vanish at the poles)
//   PolynomialEven  alpha(z) = alpha0 * (1 - z^2)
// Custom profiles must be even in z, vanish at z = +/-1 and be positive
// inside; these requirements are sampled on a z-grid at registration.
class AlphaModel {
  public:
    enum class Kind { constant, polynomial_even, custom_even };

    static AlphaModel constant(double alpha0);
    static AlphaModel polynomial_even(double alpha0);
    static AlphaModel custom_even(std::function<double(double)> profile);

    // z is clamped to [-1, 1] before evaluation.
    double eval(double z) const;

    Kind kind() const { return kind_; }
    double alpha0() const { return alpha0_; }
    std::string name() const;

    // True when alpha(+/-1) = 0, i.e. the poles are fixed points.
    bool vanishes_at_poles() const { return kind_ != Kind::constant; }

  private:
    AlphaModel(Kind kind, double alpha0, std::function<double(double)> profile)
        : kind_(kind), alpha0_(alpha0), profile_(std::move(profile)) {}

    Kind kind_;
    double alpha0_;
    std::function<double(double)> profile_;
};

double eval_alpha(const AlphaModel& model, double z);

// Drift and diffusion fields of the Ito equations. The noise generates a
// rotation about the z axis, so the diffusion has no z component.
struct DriftDiffusion {
    std::array<double, 3> drift;
    std::array<double, 3> diffusion;
};

// (-2 b^2 x, -2 b^2 y - 2 a(z) z, +2 a(z) y)
std::array<double, 3> ito_drift(const BlochVector& b, const AlphaModel& model, double beta);

// (-2 b y, +2 b x, 0), coefficient of dw
std::array<double, 3> ito_diffusion(const BlochVector& b, double beta);

DriftDiffusion ito_fields(const BlochVector& b, const AlphaModel& model, double beta);

}  // namespace blochsim
