#include "blochsim/core.hpp"

#include <cmath>

namespace blochsim {

double BlochVector::norm() const { return std::sqrt(norm2()); }

TimeGrid::TimeGrid(double t0_, double dt_, std::size_t n_steps_)
    : t0(t0_), dt(dt_), n_steps(n_steps_) {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be > 0");
    if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

DensityMatrix density_from_bloch(const BlochVector& b) {
    if (b.norm() > 1.0 + kPhysTol)
        throw std::invalid_argument("density_from_bloch: |b| > 1, unphysical state");
    using cd = std::complex<double>;
    return DensityMatrix{
        cd(0.5 * (1.0 + b.z), 0.0),
        cd(0.5 * b.x, -0.5 * b.y),
        cd(0.5 * b.x, 0.5 * b.y),
        cd(0.5 * (1.0 - b.z), 0.0),
    };
}

BlochVector bloch_from_density(const DensityMatrix& rho) {
    if (std::abs(rho.trace() - 1.0) > kPhysTol)
        throw std::invalid_argument("bloch_from_density: trace must be 1");
    if (std::abs(rho.b - std::conj(rho.c)) > kPhysTol ||
        std::abs(rho.a.imag()) > kPhysTol || std::abs(rho.d.imag()) > kPhysTol)
        throw std::invalid_argument("bloch_from_density: matrix must be Hermitian");
    return BlochVector{
        rho.b.real() + rho.c.real(),
        rho.c.imag() - rho.b.imag(),
        rho.a.real() - rho.d.real(),
    };
}

double purity(const BlochVector& b) { return b.norm2(); }

}  // namespace blochsim
