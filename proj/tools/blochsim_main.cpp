// blochsim: stochastic Bloch-vector dynamics of a noisy two-configuration
// system. Writes CSV time series plus a JSON manifest per run.

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blochsim/acceptance.hpp"
#include "blochsim/analytics.hpp"
#include "blochsim/ensemble.hpp"
#include "blochsim/observables.hpp"

using json = nlohmann::json;
using namespace blochsim;

namespace {

#ifndef BLOCHSIM_VERSION
#define BLOCHSIM_VERSION "dev"
#endif

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// shortest round-trip decimal, so CSV equality checks are byte-level
std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct ModelFlags {
    double alpha0 = 1.0;
    double beta = 0.0;
    bool nonlinear = false;
    double dt = 0.01;
    std::size_t steps = 40000;
    std::uint64_t seed = 1;
    double x0 = 0.0, y0 = 1.0, z0 = 0.0;
    std::string scheme = "rotation";

    void attach(CLI::App* cmd) {
        cmd->add_option("--alpha0", alpha0, "tunnelling amplitude scale");
        cmd->add_option("--beta", beta, "noise strength");
        cmd->add_flag("--nonlinear", nonlinear,
                      "state-dependent amplitude alpha0*(1-z^2) instead of constant alpha0");
        cmd->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
        cmd->add_option("--steps", steps, "number of steps")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "base seed");
        cmd->add_option("--x0", x0, "initial x");
        cmd->add_option("--y0", y0, "initial y");
        cmd->add_option("--z0", z0, "initial z");
        cmd->add_option("--scheme", scheme, "integration scheme: euler|rotation")
            ->check(CLI::IsMember({"euler", "rotation"}));
    }

    AlphaModel model() const {
        return nonlinear ? AlphaModel::polynomial_even(alpha0) : AlphaModel::constant(alpha0);
    }
    BlochVector b0() const { return BlochVector{x0, y0, z0}; }
    TimeGrid grid() const { return TimeGrid(0.0, dt, steps); }

    json to_json() const {
        return json{{"alpha0", alpha0},
                    {"alpha_model", nonlinear ? "polynomial_even" : "constant"},
                    {"beta", beta},
                    {"b0", {x0, y0, z0}},
                    {"t0", 0.0},
                    {"dt", dt},
                    {"steps", steps},
                    {"seed", seed},
                    {"scheme", scheme_name(parse_scheme(scheme))},
                    {"gaussian_sampler", NormalSampler::algorithm},
                    {"seed_derivation", "splitmix64"}};
    }
};

void write_file(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << body;
}

void write_manifest(const std::string& command, const std::string& csv_path, json config,
                    double wall_s, json extra = json::object()) {
    json m{{"command", command},
           {"version", BLOCHSIM_VERSION},
           {"config", std::move(config)},
           {"outputs", {csv_path}},
           {"wall_time_s", wall_s}};
    m.update(extra);
    write_file(csv_path + ".manifest.json", m.dump(2) + "\n");
}

Trajectory simulate(const ModelFlags& f) {
    // --seed is the base seed everywhere; a single trajectory is path 0,
    // so `ensemble --n-paths 1` reproduces `simulate` exactly
    const auto noise = brownian_path(derive_path_seed(f.seed, 0), f.dt, f.steps);
    return integrate_path(f.b0(), f.grid(), noise.increments, f.model(), f.beta,
                          parse_scheme(f.scheme));
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x,y,z\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto& s = traj.states[k];
        out += num(traj.grid.time(k));
        out += ',';
        out += num(s.x);
        out += ',';
        out += num(s.y);
        out += ',';
        out += num(s.z);
        out += '\n';
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read trajectory CSV: " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,x,y,z", 0) != 0)
        throw std::runtime_error("trajectory CSV must start with header t,x,y,z");
    std::vector<double> ts;
    std::vector<BlochVector> states;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double vals[4];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < 4; ++i) {
            const auto res = std::from_chars(p, end, vals[i]);
            if (res.ec != std::errc{}) throw std::runtime_error("bad CSV row: " + line);
            p = res.ptr;
            if (i < 3) {
                if (p == end || *p != ',') throw std::runtime_error("bad CSV row: " + line);
                ++p;
            }
        }
        ts.push_back(vals[0]);
        states.push_back(BlochVector{vals[1], vals[2], vals[3]});
    }
    if (states.size() < 2) throw std::runtime_error("trajectory CSV has fewer than two rows");
    Trajectory traj;
    traj.grid = TimeGrid(ts.front(), ts[1] - ts[0], states.size() - 1);
    traj.states = std::move(states);
    return traj;
}

int cmd_simulate(const ModelFlags& f, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto traj = simulate(f);
    write_file(out, trajectory_csv(traj));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest("simulate", out, f.to_json(), wall);
    std::cerr << "wrote " << out << " (" << traj.states.size() << " rows)\n";
    return kExitOk;
}

int cmd_localization(const ModelFlags& f, const std::string& traj_csv, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = traj_csv.empty() ? simulate(f) : trajectory_from_csv(traj_csv);
    const auto L = localization_average(traj);
    std::string body = "t,L\n";
    for (std::size_t k = 0; k < L.times.size(); ++k) {
        body += num(L.times[k]);
        body += ',';
        body += num(L.values[k]);
        body += '\n';
    }
    write_file(out, body);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json extra = json::object();
    if (!traj_csv.empty()) extra["input_trajectory"] = traj_csv;
    write_manifest("localization", out, f.to_json(), wall, extra);
    std::cerr << "wrote " << out << " (L(t_max) = " << L.values.back() << ")\n";
    return kExitOk;
}

int cmd_ensemble(const ModelFlags& f, std::uint64_t n_paths, bool compare, double tol,
                 const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    cfg.model = f.model();
    cfg.beta = f.beta;
    cfg.b0 = f.b0();
    cfg.grid = f.grid();
    cfg.scheme = parse_scheme(f.scheme);
    cfg.n_paths = n_paths;
    cfg.base_seed = f.seed;
    const auto stats = run_ensemble(cfg);

    ErrorReport rep;
    if (compare) rep = compare_to_analytic(stats, f.alpha0, f.beta, cfg.b0);

    std::string body = "t,mx,my,mz,xx,yy,zz,yz";
    if (compare) body += ",ref_mx,ref_my,ref_mz,err_mean,err_second";
    body += '\n';
    const bool critical = compare && classify_regime(f.alpha0, f.beta) == Regime::critical;
    std::vector<FirstMoments> ode;
    if (critical) ode = first_moments_ode(cfg.grid, cfg.b0, f.alpha0, f.beta);
    for (std::size_t k = 0; k < cfg.grid.n_points(); ++k) {
        const auto m = stats.mean(k);
        const auto s = stats.second(k);
        body += num(cfg.grid.time(k));
        for (double v : {m.mean_x, m.mean_y, m.mean_z, stats.mean_xx(k), s.yy, s.zz, s.yz}) {
            body += ',';
            body += num(v);
        }
        if (compare) {
            const auto ref = critical
                                 ? ode[k]
                                 : first_moments_closed_form(cfg.grid.time(k), cfg.b0, f.alpha0,
                                                             f.beta);
            for (double v : {ref.mean_x, ref.mean_y, ref.mean_z, rep.mean_err[k],
                             rep.second_err[k]}) {
                body += ',';
                body += num(v);
            }
        }
        body += '\n';
    }
    write_file(out, body);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json extra{{"n_paths", n_paths}};
    if (compare) {
        extra["compare"] = {{"max_mean_error", rep.max_mean_error},
                            {"avg_mean_error", rep.avg_mean_error},
                            {"max_second_error", rep.max_second_error},
                            {"tolerance", tol}};
    }
    json cfg_json = f.to_json();
    cfg_json["n_paths"] = n_paths;
    write_manifest("ensemble", out, cfg_json, wall, extra);

    if (compare) {
        std::cerr << "max mean error vs analytic: " << rep.max_mean_error << " (tol " << tol
                  << ")\n";
        if (rep.max_mean_error > tol) return kExitValidation;
    }
    std::cerr << "wrote " << out << " (" << n_paths << " paths)\n";
    return kExitOk;
}

int cmd_moments(const ModelFlags& f, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    if (f.nonlinear) throw CLI::ValidationError("moments requires the constant-alpha model");
    const Regime regime = classify_regime(f.alpha0, f.beta);
    const TimeGrid grid = f.grid();

    std::vector<FirstMoments> seq;
    if (regime == Regime::critical) {
        std::cerr << "critical regime (beta^2 = 2|alpha|): no closed form, using the "
                     "fourth-order ODE integration\n";
        seq = first_moments_ode(grid, f.b0(), f.alpha0, f.beta);
    } else {
        seq.reserve(grid.n_points());
        for (std::size_t k = 0; k < grid.n_points(); ++k)
            seq.push_back(first_moments_closed_form(grid.time(k), f.b0(), f.alpha0, f.beta));
    }
    std::string body = "t,mx,my,mz\n";
    for (std::size_t k = 0; k < seq.size(); ++k) {
        body += num(grid.time(k));
        body += ',';
        body += num(seq[k].mean_x);
        body += ',';
        body += num(seq[k].mean_y);
        body += ',';
        body += num(seq[k].mean_z);
        body += '\n';
    }
    write_file(out, body);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest("moments", out, f.to_json(), wall, json{{"regime", regime_name(regime)}});
    std::cout << "regime: " << regime_name(regime) << "\n";
    std::cerr << "wrote " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic Bloch-vector simulator for a noisy two-configuration system"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(BLOCHSIM_VERSION));

    ModelFlags sim_f, loc_f, ens_f, mom_f;
    std::string sim_out = "trajectory.csv";
    std::string loc_out = "localization.csv", loc_traj;
    std::string ens_out = "ensemble.csv";
    std::string mom_out = "moments.csv";
    std::uint64_t n_paths = 1000;
    bool compare = false, quick = false;
    double tol = 0.02;

    auto* sim = app.add_subcommand("simulate", "integrate one noise realization, write (t,x,y,z)");
    sim_f.attach(sim);
    sim->add_option("--out", sim_out, "output CSV path");

    auto* loc = app.add_subcommand("localization",
                                   "time-averaged z^2 localization series, write (t,L)");
    loc_f.attach(loc);
    loc->add_option("--traj", loc_traj, "existing trajectory CSV (skips simulation)");
    loc->add_option("--out", loc_out, "output CSV path");

    auto* ens = app.add_subcommand("ensemble", "moment statistics over many noise realizations");
    ens_f.attach(ens);
    ens->add_option("--n-paths", n_paths, "number of noise realizations")
        ->check(CLI::PositiveNumber);
    ens->add_flag("--compare", compare, "add constant-alpha analytic reference and error columns");
    ens->add_option("--tol", tol, "with --compare: exit 2 when max mean error exceeds this");
    ens->add_option("--out", ens_out, "output CSV path");

    auto* mom = app.add_subcommand("moments", "analytic first-moment curves and regime label");
    mom_f.attach(mom);
    mom->add_option("--out", mom_out, "output CSV path");

    auto* val = app.add_subcommand("validate", "run the full validation battery");
    val->add_flag("--quick", quick, "reduced ensemble sizes, rescaled tolerances (< 1 min)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help/diagnostic
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_f, sim_out);
        if (loc->parsed()) return cmd_localization(loc_f, loc_traj, loc_out);
        if (ens->parsed()) {
            if (compare && ens_f.nonlinear) {
                std::cerr << "error: --compare needs the constant-alpha model; the nonlinear "
                             "model has no analytic reference\n";
                return kExitUsage;
            }
            return cmd_ensemble(ens_f, n_paths, compare, tol, ens_out);
        }
        if (mom->parsed()) return cmd_moments(mom_f, mom_out);
        if (val->parsed()) {
            const auto report = acceptance::run_all(quick, 0, &std::cerr);
            acceptance::print_report(report, std::cout);
            return report.all_pass() ? kExitOk : kExitValidation;
        }
    } catch (const degenerate_state_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
