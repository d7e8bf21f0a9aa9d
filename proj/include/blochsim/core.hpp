#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>

namespace blochsim {

// Absolute tolerance for physicality checks (norm bounds, Hermiticity, trace).
inline constexpr double kPhysTol = 1e-9;

// Raised when a state cannot be projected back onto the unit sphere.
class degenerate_state_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const { return x * x + y * y + z * z; }
    double norm() const;

    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

// Row-major 2x2 complex matrix: [[a, b], [c, d]].
struct DensityMatrix {
    std::complex<double> a, b, c, d;

    std::complex<double> trace() const { return a + d; }
    std::complex<double> det() const { return a * d - b * c; }
};

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double dt_, std::size_t n_steps_);

    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    std::size_t n_points() const { return n_steps + 1; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

// rho = 1/2 [[1+z, x-iy], [x+iy, 1-z]].  Rejects |b| > 1 + 1e-9.
DensityMatrix density_from_bloch(const BlochVector& b);

// Inverse map. Rejects non-Hermitian or wrong-trace input (tolerance 1e-9).
BlochVector bloch_from_density(const DensityMatrix& rho);

// x^2 + y^2 + z^2; equals 1 for pure states.
double purity(const BlochVector& b);

}  // namespace blochsim
