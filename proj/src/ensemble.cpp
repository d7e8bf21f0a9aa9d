#include "blochsim/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "step_kernels.hpp"

namespace blochsim {

namespace {

// Paths are aggregated in fixed blocks of this many, independent of the
// worker count; the block partials are then carry-merged in index order.
constexpr std::uint64_t kPathBlock = 64;

std::uint64_t splitmix64(std::uint64_t v) {
    v += 0x9e3779b97f4a7c15ULL;
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return v ^ (v >> 31);
}

void fill_increments(std::uint64_t seed, double dt, std::vector<double>& out) {
    NormalSampler sampler(seed);
    const double s = std::sqrt(dt);
    for (double& v : out) v = s * sampler.next();
}

unsigned effective_workers(unsigned requested, std::uint64_t n_blocks) {
    unsigned w = requested != 0 ? requested : std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    if (w > n_blocks) w = static_cast<unsigned>(n_blocks);
    return w;
}

void validate_config(const RunConfig& config) {
    if (config.n_paths < 1) throw std::invalid_argument("RunConfig: n_paths must be >= 1");
    if (std::abs(config.b0.norm() - 1.0) > kPhysTol)
        throw std::invalid_argument("RunConfig: b0 must lie on the unit sphere");
    if (!std::isfinite(config.beta)) throw std::invalid_argument("RunConfig: beta must be finite");
}

// Stats of one block of consecutive paths, accumulated in path order.
EnsembleStats block_stats(const RunConfig& config, std::uint64_t first, std::uint64_t last,
                          std::vector<double>& noise_buf) {
    EnsembleStats st = EnsembleStats::zero(config.grid);
    const std::size_t n_steps = config.grid.n_steps;
    for (std::uint64_t p = first; p < last; ++p) {
        try {
            fill_increments(derive_path_seed(config.base_seed, p), config.grid.dt, noise_buf);
            BlochVector b = config.b0;
            st.add_state(0, b);
            for (std::size_t k = 0; k < n_steps; ++k) {
                b = detail::advance(b, config.grid.dt, noise_buf[k], config.model, config.beta,
                                    config.scheme);
                st.add_state(k + 1, b);
            }
            ++st.n;
        } catch (const degenerate_state_error& e) {
            throw degenerate_state_error("path " + std::to_string(p) + ": " + e.what());
        }
    }
    return st;
}

}  // namespace

double NormalSampler::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

std::uint64_t derive_path_seed(std::uint64_t base_seed, std::uint64_t path_index) {
    return splitmix64(base_seed + 0x9e3779b97f4a7c15ULL * (path_index + 1));
}

NoisePath brownian_path(std::uint64_t seed, double dt, std::size_t n) {
    if (!(dt > 0.0)) throw std::invalid_argument("brownian_path: dt must be > 0");
    if (n < 1) throw std::invalid_argument("brownian_path: n must be >= 1");
    NoisePath path{seed, dt, std::vector<double>(n)};
    fill_increments(seed, dt, path.increments);
    return path;
}

EnsembleStats EnsembleStats::zero(const TimeGrid& grid) {
    EnsembleStats st;
    st.grid = grid;
    st.n = 0;
    const std::size_t m = grid.n_points();
    st.sum_x.assign(m, 0.0);
    st.sum_y.assign(m, 0.0);
    st.sum_z.assign(m, 0.0);
    st.sum_xx.assign(m, 0.0);
    st.sum_yy.assign(m, 0.0);
    st.sum_zz.assign(m, 0.0);
    st.sum_yz.assign(m, 0.0);
    return st;
}

void EnsembleStats::add_state(std::size_t k, const BlochVector& b) {
    sum_x[k] += b.x;
    sum_y[k] += b.y;
    sum_z[k] += b.z;
    sum_xx[k] += b.x * b.x;
    sum_yy[k] += b.y * b.y;
    sum_zz[k] += b.z * b.z;
    sum_yz[k] += b.y * b.z;
}

FirstMoments EnsembleStats::mean(std::size_t k) const {
    const double inv = 1.0 / static_cast<double>(n);
    return FirstMoments{sum_x[k] * inv, sum_y[k] * inv, sum_z[k] * inv};
}

SecondMoments EnsembleStats::second(std::size_t k) const {
    const double inv = 1.0 / static_cast<double>(n);
    return SecondMoments{sum_zz[k] * inv, sum_yy[k] * inv, sum_yz[k] * inv};
}

EnsembleStats merge_stats(const EnsembleStats& a, const EnsembleStats& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("merge_stats: grid mismatch");
    EnsembleStats out = a;
    out.n += b.n;
    const std::size_t m = out.sum_x.size();
    for (std::size_t k = 0; k < m; ++k) {
        out.sum_x[k] += b.sum_x[k];
        out.sum_y[k] += b.sum_y[k];
        out.sum_z[k] += b.sum_z[k];
        out.sum_xx[k] += b.sum_xx[k];
        out.sum_yy[k] += b.sum_yy[k];
        out.sum_zz[k] += b.sum_zz[k];
        out.sum_yz[k] += b.sum_yz[k];
    }
    return out;
}

EnsembleStats run_ensemble(const RunConfig& config) {
    validate_config(config);

    const std::uint64_t n_blocks = (config.n_paths + kPathBlock - 1) / kPathBlock;
    const unsigned workers = effective_workers(config.n_workers, n_blocks);

    std::atomic<std::uint64_t> next_block{0};
    std::mutex mtx;
    std::condition_variable cv;
    std::map<std::uint64_t, EnsembleStats> done;
    std::exception_ptr error;

    auto work = [&]() {
        std::vector<double> noise_buf(config.grid.n_steps);
        for (;;) {
            const std::uint64_t blk = next_block.fetch_add(1);
            if (blk >= n_blocks) return;
            const std::uint64_t first = blk * kPathBlock;
            const std::uint64_t last = std::min(first + kPathBlock, config.n_paths);
            try {
                EnsembleStats st = block_stats(config, first, last, noise_buf);
                std::lock_guard lock(mtx);
                done.emplace(blk, std::move(st));
            } catch (...) {
                {
                    std::lock_guard lock(mtx);
                    if (!error) error = std::current_exception();
                }
                next_block.store(n_blocks);  // stop handing out work
            }
            cv.notify_one();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);

    // Carry-merge blocks in index order (binary-counter tree reduction):
    // the merge shape depends only on n_blocks, never on scheduling.
    std::vector<EnsembleStats> levels;
    std::vector<bool> occupied;
    for (std::uint64_t expect = 0; expect < n_blocks; ++expect) {
        EnsembleStats carry;
        {
            std::unique_lock lock(mtx);
            cv.wait(lock, [&] { return done.count(expect) > 0 || error; });
            if (error) break;
            carry = std::move(done.at(expect));
            done.erase(expect);
        }
        std::size_t level = 0;
        for (;;) {
            if (levels.size() <= level) {
                levels.push_back(std::move(carry));
                occupied.push_back(true);
                break;
            }
            if (!occupied[level]) {
                levels[level] = std::move(carry);
                occupied[level] = true;
                break;
            }
            carry = merge_stats(levels[level], carry);
            levels[level] = EnsembleStats{};
            occupied[level] = false;
            ++level;
        }
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    EnsembleStats result;
    bool have = false;
    for (std::size_t level = 0; level < levels.size(); ++level) {
        if (!occupied[level]) continue;
        result = have ? merge_stats(levels[level], result) : std::move(levels[level]);
        have = true;
    }
    return result;
}

std::vector<BlochVector> terminal_snapshot(const RunConfig& config) {
    validate_config(config);

    std::vector<BlochVector> out(config.n_paths);
    const std::uint64_t n_blocks = (config.n_paths + kPathBlock - 1) / kPathBlock;
    const unsigned workers = effective_workers(config.n_workers, n_blocks);
    std::atomic<std::uint64_t> next_block{0};
    std::mutex mtx;
    std::exception_ptr error;

    auto work = [&]() {
        std::vector<double> noise_buf(config.grid.n_steps);
        for (;;) {
            const std::uint64_t blk = next_block.fetch_add(1);
            if (blk >= n_blocks) return;
            const std::uint64_t first = blk * kPathBlock;
            const std::uint64_t last = std::min(first + kPathBlock, config.n_paths);
            std::uint64_t p = first;
            try {
                for (; p < last; ++p) {
                    fill_increments(derive_path_seed(config.base_seed, p), config.grid.dt,
                                    noise_buf);
                    BlochVector b = config.b0;
                    for (std::size_t k = 0; k < config.grid.n_steps; ++k)
                        b = detail::advance(b, config.grid.dt, noise_buf[k], config.model,
                                            config.beta, config.scheme);
                    out[p] = b;
                }
            } catch (const degenerate_state_error& e) {
                std::lock_guard lock(mtx);
                if (!error)
                    error = std::make_exception_ptr(
                        degenerate_state_error("path " + std::to_string(p) + ": " + e.what()));
                next_block.store(n_blocks);
            } catch (...) {
                std::lock_guard lock(mtx);
                if (!error) error = std::current_exception();
                next_block.store(n_blocks);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

ErrorReport compare_to_analytic(const EnsembleStats& stats, double alpha, double beta,
                                const BlochVector& b0) {
    if (stats.n == 0) throw std::invalid_argument("compare_to_analytic: empty stats");

    const bool critical = classify_regime(alpha, beta) == Regime::critical;
    std::vector<FirstMoments> ode_means;
    if (critical) ode_means = first_moments_ode(stats.grid, b0, alpha, beta);

    const SecondMoments init{b0.z * b0.z, b0.y * b0.y, b0.y * b0.z};
    const auto ref_second = second_moments_ode(stats.grid, init, alpha, beta);

    ErrorReport rep;
    const std::size_t m = stats.grid.n_points();
    rep.mean_err.resize(m);
    rep.second_err.resize(m);
    double sum_me = 0.0, sum_se = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const FirstMoments ref =
            critical ? ode_means[k]
                     : first_moments_closed_form(stats.grid.time(k), b0, alpha, beta);
        const FirstMoments mc = stats.mean(k);
        const double me = std::max({std::abs(mc.mean_x - ref.mean_x),
                                    std::abs(mc.mean_y - ref.mean_y),
                                    std::abs(mc.mean_z - ref.mean_z)});
        const SecondMoments sc = stats.second(k);
        const double se = std::max({std::abs(sc.zz - ref_second[k].zz),
                                    std::abs(sc.yy - ref_second[k].yy),
                                    std::abs(sc.yz - ref_second[k].yz)});
        rep.mean_err[k] = me;
        rep.second_err[k] = se;
        rep.max_mean_error = std::max(rep.max_mean_error, me);
        rep.max_second_error = std::max(rep.max_second_error, se);
        sum_me += me;
        sum_se += se;
    }
    rep.avg_mean_error = sum_me / static_cast<double>(m);
    rep.avg_second_error = sum_se / static_cast<double>(m);
    return rep;
}

}  // namespace blochsim
