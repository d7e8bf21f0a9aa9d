#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "blochsim/core.hpp"
#include "blochsim/integrators.hpp"

namespace blochsim {

struct Histogram {
    std::vector<double> bin_edges;       // strictly increasing
    std::vector<std::uint64_t> counts;   // bin_edges.size() - 1 entries
    std::uint64_t total = 0;
};

struct LocalizationSeries {
    std::vector<double> times;
    std::vector<double> values;  // L(t) in [0, 1]
};

// L(t_k) = (1/t_k) * trapezoidal integral of z^2 over [0, t_k];
// L at the first point is z(0)^2.
LocalizationSeries localization_average(const Trajectory& traj);

// Fraction of trajectory samples with z^2 > threshold^2. threshold in (0, 1).
double pole_occupancy(const Trajectory& traj, double threshold);

// Standard binning of z samples; samples outside [edges.front(), edges.back()]
// are rejected. The last bin is closed on the right.
Histogram z_histogram(std::span<const double> samples, std::span<const double> edges);

struct TailFit {
    double gamma = 0.0;     // slope of log(density) vs -log(1 - z)
    double residual = 0.0;  // RMS residual of the fit
    int bins_used = 0;
};

// Least-squares estimate of the tail exponent of the histogram density near
// z = 1 over bins with left edge in [1 - window, 1). The outermost bin is
// excluded to suppress boundary-atom contamination. Requires >= 4 nonempty
// bins in the window.
TailFit tail_exponent(const Histogram& hist, double window);

struct FluxEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_in_band = 0;
};

// Kernel estimate of <delta(z - z_c) y> with a mass-one box kernel:
// mean over samples of y * K((z - z_c)/bandwidth) / bandwidth, K(u) = 1/2 on
// [-1, 1]. Returns nullopt when no sample lies within the band (an undefined
// estimate, distinct from zero).
std::optional<FluxEstimate> meridian_flux(std::span<const BlochVector> snapshot, double z_c,
                                          double bandwidth);

// Hysteresis counter: a pole visit begins when |z| > enter and ends when
// |z| < exit; counts alternations between the + and - pole.
// Requires 0 < exit < enter < 1.
int transition_count(const Trajectory& traj, double enter, double exit);

}  // namespace blochsim
