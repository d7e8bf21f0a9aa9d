#include "blochsim/observables.hpp"

#include <algorithm>
#include <cmath>

namespace blochsim {

LocalizationSeries localization_average(const Trajectory& traj) {
    if (traj.states.empty())
        throw std::invalid_argument("localization_average: empty trajectory");

    LocalizationSeries out;
    const std::size_t n = traj.states.size();
    out.times.reserve(n);
    out.values.reserve(n);

    const double dt = traj.grid.dt;
    double integral = 0.0;
    double prev_z2 = traj.states[0].z * traj.states[0].z;
    out.times.push_back(traj.grid.time(0));
    out.values.push_back(prev_z2);
    for (std::size_t k = 1; k < n; ++k) {
        const double z2 = traj.states[k].z * traj.states[k].z;
        integral += 0.5 * dt * (prev_z2 + z2);
        prev_z2 = z2;
        out.times.push_back(traj.grid.time(k));
        out.values.push_back(integral / (static_cast<double>(k) * dt));
    }
    return out;
}

double pole_occupancy(const Trajectory& traj, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("pole_occupancy: threshold must be in (0, 1)");
    if (traj.states.empty())
        throw std::invalid_argument("pole_occupancy: empty trajectory");
    const double t2 = threshold * threshold;
    std::size_t hits = 0;
    for (const auto& s : traj.states)
        if (s.z * s.z > t2) ++hits;
    return static_cast<double>(hits) / static_cast<double>(traj.states.size());
}

Histogram z_histogram(std::span<const double> samples, std::span<const double> edges) {
    if (edges.size() < 2)
        throw std::invalid_argument("z_histogram: need at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw std::invalid_argument("z_histogram: edges must be strictly increasing");

    Histogram h;
    h.bin_edges.assign(edges.begin(), edges.end());
    h.counts.assign(edges.size() - 1, 0);
    for (const double s : samples) {
        if (s < edges.front() || s > edges.back())
            throw std::invalid_argument("z_histogram: sample outside histogram range");
        // last bin is closed on the right
        auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), s);
        std::size_t idx = static_cast<std::size_t>(it - h.bin_edges.begin());
        idx = (idx == 0) ? 0 : idx - 1;
        if (idx >= h.counts.size()) idx = h.counts.size() - 1;
        ++h.counts[idx];
    }
    h.total = samples.size();
    return h;
}

TailFit tail_exponent(const Histogram& hist, double window) {
    if (!(window > 0.0 && window < 1.0))
        throw std::invalid_argument("tail_exponent: window must be in (0, 1)");

    const double lo = 1.0 - window;
    std::vector<double> xs, ys;
    // exclude the outermost bin: boundary-atom contamination
    for (std::size_t i = 0; i + 1 < hist.counts.size(); ++i) {
        const double a = hist.bin_edges[i];
        const double b = hist.bin_edges[i + 1];
        if (a < lo || hist.counts[i] == 0) continue;
        const double mid = 0.5 * (a + b);
        if (!(mid < 1.0)) continue;
        const double dens =
            static_cast<double>(hist.counts[i]) / (static_cast<double>(hist.total) * (b - a));
        xs.push_back(-std::log(1.0 - mid));
        ys.push_back(std::log(dens));
    }
    if (xs.size() < 4)
        throw std::invalid_argument("tail_exponent: fewer than 4 nonempty bins in the window");

    const std::size_t m = xs.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = m * sxx - sx * sx;
    const double gamma = (m * sxy - sx * sy) / denom;
    const double icpt = (sy - gamma * sx) / m;
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (gamma * xs[i] + icpt);
        ssr += r * r;
    }
    return TailFit{gamma, std::sqrt(ssr / m), static_cast<int>(m)};
}

std::optional<FluxEstimate> meridian_flux(std::span<const BlochVector> snapshot, double z_c,
                                          double bandwidth) {
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("meridian_flux: bandwidth must be > 0");
    if (!(z_c > -1.0 && z_c < 1.0))
        throw std::invalid_argument("meridian_flux: z_c must be in (-1, 1)");
    if (snapshot.empty())
        throw std::invalid_argument("meridian_flux: empty snapshot");

    // per-sample kernel values y * K((z - z_c)/h)/h, K = 1/2 on [-1, 1]
    const double n = static_cast<double>(snapshot.size());
    double sum = 0.0, sum2 = 0.0;
    std::uint64_t in_band = 0;
    for (const auto& s : snapshot) {
        double v = 0.0;
        if (std::abs(s.z - z_c) <= bandwidth) {
            v = s.y * 0.5 / bandwidth;
            ++in_band;
        }
        sum += v;
        sum2 += v * v;
    }
    if (in_band == 0) return std::nullopt;

    const double mean = sum / n;
    const double var = (sum2 - n * mean * mean) / (n - 1.0);
    return FluxEstimate{mean, std::sqrt(std::max(var, 0.0) / n), in_band};
}

int transition_count(const Trajectory& traj, double enter, double exit) {
    if (!(exit > 0.0 && enter < 1.0 && exit < enter))
        throw std::invalid_argument("transition_count: need 0 < exit < enter < 1");

    int count = 0;
    int inside = 0;     // +1 / -1 while within a pole visit, 0 otherwise
    int last_pole = 0;  // sign of the previous completed visit
    for (const auto& s : traj.states) {
        if (inside == 0) {
            if (std::abs(s.z) > enter) {
                const int p = s.z > 0.0 ? 1 : -1;
                if (last_pole != 0 && p != last_pole) ++count;
                last_pole = p;
                inside = p;
            }
        } else if (std::abs(s.z) < exit) {
            inside = 0;
        }
    }
    return count;
}

}  // namespace blochsim
