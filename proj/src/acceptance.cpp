#include "blochsim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blochsim/analytics.hpp"
#include "blochsim/ensemble.hpp"
#include "blochsim/observables.hpp"

namespace blochsim::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

// Fixed base seeds, one per criterion, so reruns are bit-identical.
constexpr std::uint64_t kSeedUnderdamped = 12345;
constexpr std::uint64_t kSeedOverdamped = 23456;
constexpr std::uint64_t kSeedStationary = 34567;
constexpr std::uint64_t kSeedNorm = 45678;
constexpr std::uint64_t kSeedLocalization = 56789;
constexpr std::uint64_t kSeedContrast = 67890;
constexpr std::uint64_t kSeedFlux = 78901;
constexpr std::uint64_t kSeedScaling = 89012;

struct Ctx {
    bool quick;
    unsigned workers;
    std::ostream* progress;
    Report report;

    // tolerance rescale for mean comparisons: 3 SE tracks 1/sqrt(n)
    std::uint64_t n_paths(std::uint64_t full) const { return quick ? full / 10 : full; }
    double mc_tol(double full_tol, std::uint64_t n_full) const {
        return quick ? full_tol * std::sqrt(static_cast<double>(n_full) /
                                            static_cast<double>(n_paths(n_full)))
                     : full_tol;
    }

    void note(const std::string& line) {
        if (progress) (*progress) << line << "\n" << std::flush;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

template <typename Fn>
void criterion(Ctx& ctx, int id, const std::string& name, Fn body) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    r.id = id;
    r.name = name;
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ctx.note("  [" + std::string(r.pass ? "PASS" : (r.informational ? "info" : "FAIL")) + "] " +
             std::to_string(id) + " " + name + ": " + r.detail);
    ctx.report.results.push_back(std::move(r));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct MeanErrors {
    double max_err = 0.0;  // over grid points kept and x,y,z
};

MeanErrors mean_errors_vs_closed_form(const EnsembleStats& stats, double alpha, double beta,
                                      const BlochVector& b0, std::size_t k_max) {
    MeanErrors e;
    for (std::size_t k = 0; k <= k_max; ++k) {
        const auto ref = first_moments_closed_form(stats.grid.time(k), b0, alpha, beta);
        const auto mc = stats.mean(k);
        e.max_err = std::max({e.max_err, std::abs(mc.mean_x - ref.mean_x),
                              std::abs(mc.mean_y - ref.mean_y),
                              std::abs(mc.mean_z - ref.mean_z)});
    }
    return e;
}

struct LocStats {
    double occupancy;
    double L_final;
    int transitions;
};

LocStats localization_run(std::uint64_t seed, std::size_t steps, double dt, Scheme scheme) {
    const TimeGrid grid(0.0, dt, steps);
    const auto noise = brownian_path(seed, dt, steps);
    const auto traj = integrate_path({0.0, 1.0, 0.0}, grid, noise.increments,
                                     AlphaModel::polynomial_even(1.0), 7.0, scheme);
    return LocStats{pole_occupancy(traj, 0.9), localization_average(traj).values.back(),
                    transition_count(traj, 0.9, 0.5)};
}

std::string loc_summary(const std::vector<LocStats>& runs) {
    std::vector<double> occ, L;
    int seeds_with_transition = 0;
    for (const auto& r : runs) {
        occ.push_back(r.occupancy);
        L.push_back(r.L_final);
        if (r.transitions >= 1) ++seeds_with_transition;
    }
    return "occ med=" + fmt(median(occ)) + ", L med=" + fmt(median(L)) +
           ", trans>=1 in " + std::to_string(seeds_with_transition) + "/" +
           std::to_string(runs.size());
}

// ----- criteria -----

void c1_c3_underdamped(Ctx& ctx) {
    const double alpha = 1.0, beta = 0.7, dt = 1e-3;
    const double t_deco = 20.0 / (beta * beta);
    const std::size_t steps = static_cast<std::size_t>(std::ceil(t_deco / dt));
    RunConfig cfg;
    cfg.model = AlphaModel::constant(alpha);
    cfg.beta = beta;
    cfg.b0 = {0.0, 0.0, 1.0};
    cfg.grid = TimeGrid(0.0, dt, steps);
    cfg.scheme = Scheme::rotation_splitting;
    cfg.n_paths = ctx.n_paths(20000);
    cfg.base_seed = kSeedUnderdamped;
    cfg.n_workers = ctx.workers;
    EnsembleStats stats;

    criterion(ctx, 1, "underdamped moments vs closed form", [&](CriterionResult& r) {
        stats = run_ensemble(cfg);
        const double tol = ctx.mc_tol(0.02, 20000);
        const auto e = mean_errors_vs_closed_form(stats, alpha, beta, cfg.b0,
                                                  static_cast<std::size_t>(5.0 / dt));
        r.pass = e.max_err <= tol;
        r.detail = "max |<x,y,z>_MC - analytic| = " + fmt(e.max_err) + " (tol " + fmt(tol) +
                   ", n=" + std::to_string(cfg.n_paths) + ", t in [0,5], rotation splitting)";
    });

    criterion(ctx, 3, "decoherence at t = 20/beta^2 (underdamped half)",
              [&](CriterionResult& r) {
                  const double tol = ctx.mc_tol(0.03, 20000);
                  const auto m = stats.mean(steps);
                  const double worst = std::max(
                      {std::abs(m.mean_x), std::abs(m.mean_y), std::abs(m.mean_z)});
                  r.pass = worst <= tol;
                  r.detail = "max |<.>| = " + fmt(worst) + " at t = " + fmt(stats.grid.time(steps)) +
                             " (tol " + fmt(tol) + ")";
              });
}

void c2_c3_overdamped(Ctx& ctx) {
    const double alpha = 1.0, beta = 2.0, dt = 1e-3;
    const std::size_t steps = 5000;  // t = 5 = 20/beta^2
    RunConfig cfg;
    cfg.model = AlphaModel::constant(alpha);
    cfg.beta = beta;
    cfg.b0 = {0.0, 0.0, 1.0};
    cfg.grid = TimeGrid(0.0, dt, steps);
    cfg.scheme = Scheme::rotation_splitting;
    cfg.n_paths = ctx.n_paths(20000);
    cfg.base_seed = kSeedOverdamped;
    cfg.n_workers = ctx.workers;
    EnsembleStats stats;

    criterion(ctx, 2, "overdamped moments and slow relaxation rate", [&](CriterionResult& r) {
        stats = run_ensemble(cfg);
        const double tol = ctx.mc_tol(0.02, 20000);
        const auto e = mean_errors_vs_closed_form(stats, alpha, beta, cfg.b0, steps);

        // exponential fit of <z> over t in [1, 4]
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t m = 0;
        for (std::size_t k = static_cast<std::size_t>(1.0 / dt);
             k <= static_cast<std::size_t>(4.0 / dt); ++k) {
            const double mz = stats.mean(k).mean_z;
            if (mz <= 0.0) continue;
            const double x = stats.grid.time(k), y = std::log(mz);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
        const double rate = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double want = slow_relaxation_rate(alpha, beta);  // 0.535898...
        const double rate_tol = ctx.quick ? 0.2 : 0.1;
        const bool rate_ok = std::abs(rate - want) <= rate_tol * want;

        r.pass = e.max_err <= tol && rate_ok;
        r.detail = "max dev = " + fmt(e.max_err) + " (tol " + fmt(tol) + "); fitted rate = " +
                   fmt(rate) + " vs " + fmt(want) + " (" + fmt(100 * rate_tol) + "% band)";
    });

    criterion(ctx, 3, "decoherence at t = 20/beta^2 (overdamped half)", [&](CriterionResult& r) {
        const double tol = ctx.mc_tol(0.03, 20000);
        const auto m = stats.mean(steps);
        const double worst =
            std::max({std::abs(m.mean_x), std::abs(m.mean_y), std::abs(m.mean_z)});
        const auto analytic = first_moments_closed_form(5.0, cfg.b0, alpha, beta);
        r.pass = worst <= tol;
        r.detail = "max |<.>| = " + fmt(worst) + " (tol " + fmt(tol) +
                   "); the exact closed-form value at t=5 is " + fmt(std::abs(analytic.mean_z)) +
                   ", so this horizon cannot decohere below 0.03 in the overdamped regime" +
                   " (slow rate " + fmt(slow_relaxation_rate(alpha, beta)) + " << beta^2)";
    });
}

void c4_stationary(Ctx& ctx) {
    criterion(ctx, 4, "second-moment stationarity at 1/3", [&](CriterionResult& r) {
        const double alpha = 1.0, beta = 1.0, dt = 1e-3;
        RunConfig cfg;
        cfg.model = AlphaModel::constant(alpha);
        cfg.beta = beta;
        cfg.b0 = {0.0, 0.0, 1.0};
        cfg.grid = TimeGrid(0.0, dt, 10000);
        cfg.scheme = Scheme::rotation_splitting;
        cfg.n_paths = ctx.n_paths(20000);
        cfg.base_seed = kSeedStationary;
        cfg.n_workers = ctx.workers;
        const auto stats = run_ensemble(cfg);
        const auto s = stats.second(10000);
        const double tol = ctx.mc_tol(0.02, 20000);
        const double third = 1.0 / 3.0;
        const double mc_dev = std::max({std::abs(stats.mean_xx(10000) - third),
                                        std::abs(s.yy - third), std::abs(s.zz - third)});
        const bool mc_ok = mc_dev <= tol && std::abs(s.yz) <= tol;

        // the moment ODE must reach the 1/3 values analytically
        const auto ode = second_moments_ode(TimeGrid(0.0, 1e-4, 100000),
                                            SecondMoments{1.0, 0.0, 0.0}, alpha, beta);
        const auto& last = ode.back();
        const double ode_dev = std::max({std::abs(last.zz - third), std::abs(last.yy - third),
                                         std::abs(last.xx() - third)});
        const bool ode_ok = ode_dev <= 1e-6;

        r.pass = mc_ok && ode_ok;
        r.detail = "MC dev = " + fmt(mc_dev) + ", |<yz>| = " + fmt(std::abs(s.yz)) + " (tol " +
                   fmt(tol) + "); ODE dev from 1/3 at t=10 = " + fmt(ode_dev) +
                   " (tol 1e-6; ODE |yz| = " + fmt(std::abs(last.yz)) + ")";
    });
}

void c5_norm(Ctx& ctx) {
    criterion(ctx, 5, "norm conservation over many steps", [&](CriterionResult& r) {
        const std::size_t steps = ctx.quick ? 20000 : 100000;
        const TimeGrid grid(0.0, 1e-2, steps);
        const auto noise = brownian_path(kSeedNorm, grid.dt, steps);
        const auto model = AlphaModel::polynomial_even(1.0);

        const auto rot = integrate_path({0.0, 1.0, 0.0}, grid, noise.increments, model, 7.0,
                                        Scheme::rotation_splitting);
        double worst_rot = 0.0;
        for (const auto& s : rot.states) worst_rot = std::max(worst_rot, std::abs(s.norm() - 1.0));

        const auto em = integrate_path({0.0, 1.0, 0.0}, grid, noise.increments, model, 7.0,
                                       Scheme::euler_maruyama_renorm);
        double worst_em = 0.0;
        for (const auto& s : em.states) worst_em = std::max(worst_em, std::abs(s.norm() - 1.0));

        r.pass = worst_rot <= 1e-12 && worst_em <= 1e-14;
        r.detail = "rotation drift = " + fmt(worst_rot) + " (tol 1e-12) over " +
                   std::to_string(steps) + " steps at beta=7; euler post-renorm drift = " +
                   fmt(worst_em);
    });
}

void c6_recurrence(Ctx& ctx) {
    criterion(ctx, 6, "zero-noise tunnelling recurrence", [&](CriterionResult& r) {
        const double dt = 1e-3;
        const std::size_t steps = static_cast<std::size_t>(std::llround(10.0 * kPi / dt));
        const TimeGrid grid(0.0, dt, steps);
        const std::vector<double> no_noise(steps, 0.0);
        const auto traj = integrate_path({0.0, 0.0, 1.0}, grid, no_noise,
                                         AlphaModel::constant(1.0), 0.0,
                                         Scheme::rotation_splitting);
        double worst = 0.0;
        for (std::size_t k = 0; k <= steps; ++k)
            worst = std::max(worst, std::abs(traj.states[k].z - std::cos(2.0 * grid.time(k))));
        r.pass = worst <= 1e-10;
        r.detail = "max |z - cos(2t)| = " + fmt(worst) + " over 10 periods (tol 1e-10)";
    });
}

void c7_nonlinear_noiseless(Ctx& ctx) {
    criterion(ctx, 7, "noiseless nonlinear conservation and meridian flow",
              [&](CriterionResult& r) {
                  const double dt = 1e-4;
                  const std::size_t steps = 500000;  // t = 50
                  const TimeGrid grid(0.0, dt, steps);
                  const std::vector<double> no_noise(steps, 0.0);
                  const auto model = AlphaModel::polynomial_even(1.0);

                  const auto orbit = integrate_path({0.5, 0.0, std::sqrt(0.75)}, grid, no_noise,
                                                    model, 0.0, Scheme::rotation_splitting);
                  double worst_x = 0.0;
                  for (const auto& s : orbit.states)
                      worst_x = std::max(worst_x, std::abs(s.x - 0.5));

                  const auto meridian = integrate_path({0.0, 0.6, 0.8}, grid, no_noise, model,
                                                       0.0, Scheme::rotation_splitting);
                  bool monotone = true;
                  double prev = meridian.states[0].z;
                  for (const auto& s : meridian.states) {
                      if (s.z < prev - 1e-15) monotone = false;
                      prev = s.z;
                  }
                  const double z_end = meridian.states.back().z;

                  r.pass = worst_x <= 1e-6 && monotone && z_end > 0.99;
                  r.detail = "max |x - x0| = " + fmt(worst_x) +
                             " (tol 1e-6, t in [0,50]); meridian z " +
                             (monotone ? "monotone" : "NOT monotone") + ", z(50) = " + fmt(z_end);
              });
}

void c8_localization(Ctx& ctx) {
    const int n_seeds = ctx.quick ? 6 : 20;

    std::vector<LocStats> stated;
    for (int s = 0; s < n_seeds; ++s)
        stated.push_back(localization_run(derive_path_seed(kSeedLocalization, s), 40000, 1e-2,
                                          Scheme::rotation_splitting));

    criterion(ctx, 8, "noise+nonlinearity localization (stated: 4e4 steps)",
              [&](CriterionResult& r) {
                  std::vector<double> occ, L;
                  int with_trans = 0;
                  for (const auto& run : stated) {
                      occ.push_back(run.occupancy);
                      L.push_back(run.L_final);
                      if (run.transitions >= 1) ++with_trans;
                  }
                  const bool occ_ok = median(occ) >= 0.7;
                  const bool L_ok = median(L) >= 0.8;
                  const bool trans_ok = with_trans > n_seeds / 2;
                  r.pass = occ_ok && L_ok && trans_ok;
                  r.detail = loc_summary(stated) +
                             " (need occ>=0.7, L>=0.8, majority with a transition; "
                             "t_max=400 is too short for the true dynamics, see notes)";
              });

    if (!ctx.quick) {
        criterion(ctx, 8, "supplementary: same thresholds at 4e5 steps (t_max=4000)",
                  [&](CriterionResult& r) {
                      std::vector<LocStats> longer;
                      for (int s = 0; s < n_seeds; ++s)
                          longer.push_back(localization_run(
                              derive_path_seed(kSeedLocalization, s), 400000, 1e-2,
                              Scheme::rotation_splitting));
                      std::vector<double> occ, L;
                      int with_trans = 0;
                      for (const auto& run : longer) {
                          occ.push_back(run.occupancy);
                          L.push_back(run.L_final);
                          if (run.transitions >= 1) ++with_trans;
                      }
                      r.informational = true;
                      r.pass = median(occ) >= 0.7 && median(L) >= 0.8 &&
                               with_trans > n_seeds / 2;
                      r.detail = loc_summary(longer);
                  });

        criterion(ctx, 8, "supplementary: euler scheme at the stated parameters",
                  [&](CriterionResult& r) {
                      std::vector<LocStats> em;
                      for (int s = 0; s < n_seeds; ++s)
                          em.push_back(localization_run(derive_path_seed(kSeedLocalization, s),
                                                        40000, 1e-2,
                                                        Scheme::euler_maruyama_renorm));
                      r.informational = true;
                      r.pass = true;
                      r.detail = loc_summary(em) +
                                 " (transverse-collapse artifact: occupancy saturates while "
                                 "transitions vanish; euler is unusable at beta=7, see notes)";
                  });
    }
}

void c9_contrast(Ctx& ctx) {
    criterion(ctx, 9, "contrast: constant alpha stays delocalized", [&](CriterionResult& r) {
        RunConfig cfg;
        cfg.model = AlphaModel::constant(1.0);
        cfg.beta = 7.0;
        cfg.b0 = {0.0, 0.0, 1.0};
        cfg.grid = TimeGrid(0.0, 1e-3, 40000);  // t = 40
        cfg.scheme = Scheme::rotation_splitting;
        cfg.n_paths = ctx.quick ? 500 : 2000;
        cfg.base_seed = kSeedContrast;
        cfg.n_workers = ctx.workers;
        const auto stats = run_ensemble(cfg);
        const double zz = stats.second(cfg.grid.n_steps).zz;
        const double tol = ctx.quick ? 0.06 : 0.03;
        r.pass = std::abs(zz - 1.0 / 3.0) <= tol;
        r.detail = "<z^2>(t=40) = " + fmt(zz) + " vs 1/3 (tol " + fmt(tol) + ", n=" +
                   std::to_string(cfg.n_paths) + "): noise alone does not localize";
    });
}

void c10_flux(Ctx& ctx) {
    criterion(ctx, 10, "steady-state meridian flux vanishes", [&](CriterionResult& r) {
        RunConfig cfg;
        cfg.model = AlphaModel::polynomial_even(1.0);
        cfg.beta = 7.0;
        cfg.b0 = {0.0, 1.0, 0.0};
        cfg.grid = TimeGrid(0.0, 1e-2, 20000);  // t = 200
        cfg.scheme = Scheme::rotation_splitting;
        cfg.n_paths = ctx.quick ? 1000 : 4000;
        cfg.base_seed = kSeedFlux;
        cfg.n_workers = ctx.workers;
        const auto snap = terminal_snapshot(cfg);

        bool ok = true;
        std::string parts;
        for (double zc : {0.25, 0.5, 0.75}) {
            const auto est = meridian_flux(snap, zc, 0.02);
            if (!est) {
                ok = false;
                parts += " z_c=" + fmt(zc) + ": no samples in band;";
                continue;
            }
            const bool this_ok = std::abs(est->value) <= 3.0 * est->std_error;
            ok = ok && this_ok;
            parts += " z_c=" + fmt(zc) + ": " + fmt(est->value) + " +- " + fmt(est->std_error) +
                     " (" + std::to_string(est->n_in_band) + " in band);";
        }
        r.pass = ok;
        r.detail = "|estimate| <= 3 SE at each z_c:" + parts;
    });
}

void c11_scaling(Ctx& ctx) {
    criterion(ctx, 11, "Monte Carlo error scales as 1/sqrt(n)", [&](CriterionResult& r) {
        const double alpha = 1.0, beta = 0.7, dt = 1e-3;
        const TimeGrid grid(0.0, dt, 5000);
        const BlochVector b0{0.0, 0.0, 1.0};

        const std::uint64_t ns[3] = {100, 1000, 10000};
        const int reps_full[3] = {16, 8, 4};
        const int reps_quick[3] = {8, 4, 2};
        const int* reps = ctx.quick ? reps_quick : reps_full;

        double lx[3], ly[3];
        for (int i = 0; i < 3; ++i) {
            double err_sum = 0.0;
            for (int rep = 0; rep < reps[i]; ++rep) {
                RunConfig cfg;
                cfg.model = AlphaModel::constant(alpha);
                cfg.beta = beta;
                cfg.b0 = b0;
                cfg.grid = grid;
                cfg.scheme = Scheme::rotation_splitting;
                cfg.n_paths = ns[i];
                cfg.base_seed = derive_path_seed(kSeedScaling, 100 * i + rep);
                cfg.n_workers = ctx.workers;
                const auto stats = run_ensemble(cfg);
                err_sum +=
                    mean_errors_vs_closed_form(stats, alpha, beta, b0, grid.n_steps).max_err;
            }
            lx[i] = std::log(static_cast<double>(ns[i]));
            ly[i] = std::log(err_sum / reps[i]);
        }
        const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
        double num = 0, den = 0;
        for (int i = 0; i < 3; ++i) {
            num += (lx[i] - mx) * (ly[i] - my);
            den += (lx[i] - mx) * (lx[i] - mx);
        }
        const double slope = num / den;
        r.pass = slope >= -0.6 && slope <= -0.4;
        r.detail = "log-log slope = " + fmt(slope) + " (want -0.5 +- 0.1; errors " +
                   fmt(std::exp(ly[0])) + " / " + fmt(std::exp(ly[1])) + " / " +
                   fmt(std::exp(ly[2])) + " at n = 1e2/1e3/1e4, replicate-averaged)";
    });
}

}  // namespace

bool Report::all_pass() const {
    for (const auto& r : results)
        if (!r.informational && !r.pass) return false;
    return true;
}

Report run_all(bool quick, unsigned workers, std::ostream* progress) {
    Ctx ctx{quick, workers, progress, {}};
    ctx.note(quick ? "validation (quick mode: reduced n, 3-SE-rescaled tolerances)"
                   : "validation (full mode)");
    c1_c3_underdamped(ctx);
    c2_c3_overdamped(ctx);
    c4_stationary(ctx);
    c5_norm(ctx);
    c6_recurrence(ctx);
    c7_nonlinear_noiseless(ctx);
    c8_localization(ctx);
    c9_contrast(ctx);
    c10_flux(ctx);
    c11_scaling(ctx);
    return ctx.report;
}

void print_report(const Report& report, std::ostream& os) {
    int passed = 0, failed = 0;
    for (const auto& r : report.results) {
        const char* tag = r.informational ? (r.pass ? "info" : "info") : (r.pass ? "PASS" : "FAIL");
        os << "[" << tag << "] criterion " << r.id << ": " << r.name << "\n       " << r.detail
           << " [" << static_cast<int>(r.seconds * 1000) / 1000.0 << "s]\n";
        if (!r.informational) (r.pass ? passed : failed)++;
    }
    os << (failed == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " (" << passed
       << " passed, " << failed << " failed)\n";
}

}  // namespace blochsim::acceptance
