#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blochsim/core.hpp"
#include "blochsim/dynamics.hpp"

namespace blochsim {

enum class Scheme {
    euler_maruyama_renorm,  // discretized Ito form, renormalized every step
    rotation_splitting,     // exact x-rotation then exact z-rotation
};

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);  // "euler" | "rotation"

struct Trajectory {
    TimeGrid grid;
    std::vector<BlochVector> states;  // n_steps + 1 entries
};

// b / |b|. Throws degenerate_state_error when |b| < 1e-12.
BlochVector renormalize(const BlochVector& b);

// One Euler-Maruyama step of the Ito equations followed by renormalization.
BlochVector step_euler_maruyama(const BlochVector& b, double dt, double dW,
                                const AlphaModel& model, double beta);

// Exact rotation about x by 2*alpha(z0)*dt, then exact rotation about z by
// 2*beta*dW. Norm-preserving to machine precision, no renormalization.
BlochVector step_rotation_splitting(const BlochVector& b, double dt, double dW,
                                    const AlphaModel& model, double beta);

// Deterministic function of (b0, increments, parameters, scheme).
// increments.size() must equal grid.n_steps; |b0| = 1 within 1e-9.
Trajectory integrate_path(const BlochVector& b0, const TimeGrid& grid,
                          std::span<const double> increments, const AlphaModel& model,
                          double beta, Scheme scheme);

}  // namespace blochsim
