#pragma once

#include <string>
#include <vector>

#include "blochsim/core.hpp"

namespace blochsim {

// Ensemble-averaged first moments at one instant.
struct FirstMoments {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double mean_z = 0.0;
};

// Second moments with <x^2> eliminated through x^2 + y^2 + z^2 = 1.
struct SecondMoments {
    double zz = 0.0;  // <z^2>
    double yy = 0.0;  // <y^2>
    double yz = 0.0;  // <yz>

    double xx() const { return 1.0 - yy - zz; }
};

enum class Regime { underdamped, overdamped, critical };

std::string regime_name(Regime r);

// underdamped: beta^2 < 2|alpha|; overdamped: beta^2 > 2|alpha|;
// critical within 1e-12 of the boundary. Rejects alpha = beta = 0.
Regime classify_regime(double alpha, double beta);

// Closed-form solution of the averaged first-moment equations.
//   <x> = exp(-2 b^2 t) x0
//   <y> = exp(-b^2 t) [y0 cos(wt) + c1 sin(wt)]      (underdamped)
//   <z> = exp(-b^2 t) [z0 cos(wt) + c2 sin(wt)]
// with w = sqrt(|b^4 - 4 a^2|), c1 = (-b^2 y0 - 2 a z0)/w,
// c2 = (b^2 z0 + 2 a y0)/w; cosh/sinh in the overdamped regime.
// Throws in the critical regime (w = 0): use first_moments_ode.
FirstMoments first_moments_closed_form(double t, const BlochVector& b0, double alpha,
                                       double beta);

// Fourth-order (RK4) integration of the first-moment ODEs on the grid.
// Handles all regimes including critical.
std::vector<FirstMoments> first_moments_ode(const TimeGrid& grid, const BlochVector& b0,
                                            double alpha, double beta);

// RK4 integration of the second-moment ODEs:
//   d<z^2>/dt = 4 a <zy>
//   d<y^2>/dt = -4 a <zy> - 4 b^2 <y^2> + 4 b^2 (1 - <y^2> - <z^2>)
//   d<yz>/dt  = -2 b^2 <zy> + 2 a <y^2> - 2 a <z^2>
std::vector<SecondMoments> second_moments_ode(const TimeGrid& grid, const SecondMoments& init,
                                              double alpha, double beta);

// The 1/3-stationary point: zz = yy = xx = 1/3, yz = 0.
SecondMoments stationary_second_moments();

// beta^2 - sqrt(beta^4 - 4 alpha^2): magnitude of the slow eigenvalue of the
// (<y>, <z>) system. Defined for beta^2 >= 2|alpha| (underdamped rejected);
// equals beta^2 at the critical boundary.
double slow_relaxation_rate(double alpha, double beta);

// diag(1/2, 1/2): the large-time limit of the averaged density matrix.
DensityMatrix decoherence_limit();

}  // namespace blochsim
