#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "blochsim/analytics.hpp"
#include "blochsim/core.hpp"
#include "blochsim/integrators.hpp"

namespace blochsim {

// Standard normal draws: mt19937_64 bit stream + Box-Muller transform.
// The algorithm is fixed (and named in run manifests) so sequences are
// reproducible across library versions.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double next();

    static constexpr const char* algorithm = "box-muller/mt19937_64";

  private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// 64-bit avalanche mix; bijective for fixed base, identical across platforms.
std::uint64_t derive_path_seed(std::uint64_t base_seed, std::uint64_t path_index);

struct NoisePath {
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<double> increments;  // i.i.d. normal(0, dt)
};

// Deterministic per (seed, dt, n).
NoisePath brownian_path(std::uint64_t seed, double dt, std::size_t n);

// Streaming sums of (x, y, z) and their products per grid point, across
// noise realizations. Mergeable; merge order in run_ensemble is a fixed
// tree over path-index blocks, so results do not depend on worker count.
struct EnsembleStats {
    TimeGrid grid;
    std::uint64_t n = 0;
    std::vector<double> sum_x, sum_y, sum_z;
    std::vector<double> sum_xx, sum_yy, sum_zz, sum_yz;

    static EnsembleStats zero(const TimeGrid& grid);

    void add_state(std::size_t k, const BlochVector& b);

    FirstMoments mean(std::size_t k) const;
    SecondMoments second(std::size_t k) const;
    double mean_xx(std::size_t k) const { return sum_xx[k] / static_cast<double>(n); }
};

EnsembleStats merge_stats(const EnsembleStats& a, const EnsembleStats& b);

struct RunConfig {
    AlphaModel model = AlphaModel::constant(1.0);
    double beta = 0.0;
    BlochVector b0{0.0, 0.0, 1.0};
    TimeGrid grid;
    Scheme scheme = Scheme::euler_maruyama_renorm;
    std::uint64_t n_paths = 1;
    std::uint64_t base_seed = 0;
    unsigned n_workers = 0;  // 0 = hardware concurrency; result is independent of it
};

// Aggregates n_paths independent trajectories. Same config => same output,
// bit-identical, regardless of worker count.
EnsembleStats run_ensemble(const RunConfig& config);

// Final-time states of all paths, ordered by path index.
std::vector<BlochVector> terminal_snapshot(const RunConfig& config);

struct ErrorReport {
    std::vector<double> mean_err;    // per grid point: max over x,y,z of |MC - analytic|
    std::vector<double> second_err;  // per grid point: max over zz,yy,yz of |MC - analytic|
    double max_mean_error = 0.0;
    double avg_mean_error = 0.0;
    double max_second_error = 0.0;
    double avg_second_error = 0.0;
};

// Compares ensemble moment estimates against the constant-alpha analytic
// references (closed-form means, or the first-moment ODE in the critical
// regime; second-moment ODE). Rejects nonlinear models.
ErrorReport compare_to_analytic(const EnsembleStats& stats, double alpha, double beta,
                                const BlochVector& b0);

}  // namespace blochsim
