#pragma once

// Shared step kernels: ensemble runs must produce bit-identical states to
// integrate_path for the same noise, so both compile the same code.

#include <cmath>

#include "blochsim/core.hpp"
#include "blochsim/integrators.hpp"

namespace blochsim::detail {

inline BlochVector rotate_xz(const BlochVector& b, double theta, double phi) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double y1 = b.y * ct - b.z * st;
    const double z1 = b.z * ct + b.y * st;
    const double cp = std::cos(phi), sp = std::sin(phi);
    return BlochVector{b.x * cp - y1 * sp, y1 * cp + b.x * sp, z1};
}

inline BlochVector em_step(const BlochVector& b, double dt, double dW, double alpha,
                           double beta) {
    const double b2 = beta * beta;
    const double x = b.x + (-2.0 * b2 * b.x) * dt + (-2.0 * beta * b.y) * dW;
    const double y = b.y + (-2.0 * b2 * b.y - 2.0 * alpha * b.z) * dt + (2.0 * beta * b.x) * dW;
    const double z = b.z + (2.0 * alpha * b.y) * dt;
    return renormalize(BlochVector{x, y, z});
}

inline BlochVector advance(const BlochVector& b, double dt, double dW, const AlphaModel& model,
                           double beta, Scheme scheme) {
    if (scheme == Scheme::euler_maruyama_renorm)
        return em_step(b, dt, dW, model.eval(b.z), beta);
    return rotate_xz(b, 2.0 * model.eval(b.z) * dt, 2.0 * beta * dW);
}

}  // namespace blochsim::detail
