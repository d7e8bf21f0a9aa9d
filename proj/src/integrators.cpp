#include "blochsim/integrators.hpp"

#include <cmath>

#include "step_kernels.hpp"

namespace blochsim {

namespace {

void check_unit_norm(const BlochVector& b, double tol, const char* who) {
    if (std::abs(b.norm() - 1.0) > tol)
        throw std::invalid_argument(std::string(who) + ": state must lie on the unit sphere");
}

}  // namespace

std::string scheme_name(Scheme s) {
    return s == Scheme::euler_maruyama_renorm ? "euler_maruyama_renorm" : "rotation_splitting";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "euler" || name == "euler_maruyama_renorm") return Scheme::euler_maruyama_renorm;
    if (name == "rotation" || name == "rotation_splitting") return Scheme::rotation_splitting;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected euler|rotation)");
}

BlochVector renormalize(const BlochVector& b) {
    const double n = b.norm();
    if (n < 1e-12)
        throw degenerate_state_error("renormalize: |b| < 1e-12, cannot project to sphere");
    return BlochVector{b.x / n, b.y / n, b.z / n};
}

BlochVector step_euler_maruyama(const BlochVector& b, double dt, double dW,
                                const AlphaModel& model, double beta) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_euler_maruyama: dt must be > 0");
    check_unit_norm(b, 1e-6, "step_euler_maruyama");
    return detail::em_step(b, dt, dW, model.eval(b.z), beta);
}

BlochVector step_rotation_splitting(const BlochVector& b, double dt, double dW,
                                    const AlphaModel& model, double beta) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rotation_splitting: dt must be > 0");
    check_unit_norm(b, 1e-9, "step_rotation_splitting");
    return detail::rotate_xz(b, 2.0 * model.eval(b.z) * dt, 2.0 * beta * dW);
}

Trajectory integrate_path(const BlochVector& b0, const TimeGrid& grid,
                          std::span<const double> increments, const AlphaModel& model,
                          double beta, Scheme scheme) {
    if (increments.size() != grid.n_steps)
        throw std::invalid_argument("integrate_path: noise length must equal grid.n_steps");
    check_unit_norm(b0, kPhysTol, "integrate_path");

    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(grid.n_points());
    traj.states.push_back(b0);

    BlochVector b = b0;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        b = detail::advance(b, grid.dt, increments[k], model, beta, scheme);
        traj.states.push_back(b);
    }
    return traj;
}

}  // namespace blochsim
