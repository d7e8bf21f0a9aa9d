#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "blochsim/analytics.hpp"
#include "blochsim/ensemble.hpp"
#include "blochsim/observables.hpp"

namespace py = pybind11;
using namespace blochsim;

namespace {

std::vector<std::array<double, 2>> density_as_rows(const DensityMatrix& rho) {
    // (re, im) pairs, row-major; keeps the binding free of numpy
    return {{rho.a.real(), rho.a.imag()},
            {rho.b.real(), rho.b.imag()},
            {rho.c.real(), rho.c.imag()},
            {rho.d.real(), rho.d.imag()}};
}

}  // namespace

PYBIND11_MODULE(_blochsim, m) {
    m.doc() = "Stochastic Bloch-vector dynamics of a noisy two-configuration system";

    py::register_exception<degenerate_state_error>(m, "DegenerateStateError");

    py::class_<BlochVector>(m, "BlochVector")
        .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z"))
        .def_readwrite("x", &BlochVector::x)
        .def_readwrite("y", &BlochVector::y)
        .def_readwrite("z", &BlochVector::z)
        .def("norm", &BlochVector::norm)
        .def("__repr__", [](const BlochVector& b) {
            std::ostringstream os;
            os << "BlochVector(" << b.x << ", " << b.y << ", " << b.z << ")";
            return os.str();
        });

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def(py::init([](std::complex<double> a, std::complex<double> b, std::complex<double> c,
                         std::complex<double> d) {
                 return DensityMatrix{a, b, c, d};
             }),
             py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"))
        .def_readwrite("a", &DensityMatrix::a)
        .def_readwrite("b", &DensityMatrix::b)
        .def_readwrite("c", &DensityMatrix::c)
        .def_readwrite("d", &DensityMatrix::d)
        .def("trace", &DensityMatrix::trace)
        .def("det", &DensityMatrix::det)
        .def("rows", &density_as_rows);

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<double, double, std::size_t>(), py::arg("t0"), py::arg("dt"),
             py::arg("n_steps"))
        .def_readonly("t0", &TimeGrid::t0)
        .def_readonly("dt", &TimeGrid::dt)
        .def_readonly("n_steps", &TimeGrid::n_steps)
        .def("time", &TimeGrid::time)
        .def("n_points", &TimeGrid::n_points);

    m.def("density_from_bloch", &density_from_bloch);
    m.def("bloch_from_density", &bloch_from_density);
    m.def("purity", &purity);

    py::class_<AlphaModel>(m, "AlphaModel")
        .def_static("constant", &AlphaModel::constant, py::arg("alpha0"))
        .def_static("polynomial_even", &AlphaModel::polynomial_even, py::arg("alpha0"))
        .def_static("custom_even", &AlphaModel::custom_even, py::arg("profile"))
        .def("eval", &AlphaModel::eval)
        .def_property_readonly("name", &AlphaModel::name)
        .def_property_readonly("alpha0", &AlphaModel::alpha0)
        .def_property_readonly("vanishes_at_poles", &AlphaModel::vanishes_at_poles);

    m.def("eval_alpha", &eval_alpha);
    m.def("ito_drift", &ito_drift);
    m.def("ito_diffusion", &ito_diffusion);

    py::enum_<Scheme>(m, "Scheme")
        .value("euler_maruyama_renorm", Scheme::euler_maruyama_renorm)
        .value("rotation_splitting", Scheme::rotation_splitting);
    m.def("parse_scheme", &parse_scheme);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("grid", &Trajectory::grid)
        .def_readonly("states", &Trajectory::states)
        .def("times", [](const Trajectory& t) {
            std::vector<double> ts(t.states.size());
            for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = t.grid.time(k);
            return ts;
        })
        .def("z_series", [](const Trajectory& t) {
            std::vector<double> zs(t.states.size());
            for (std::size_t k = 0; k < zs.size(); ++k) zs[k] = t.states[k].z;
            return zs;
        });

    m.def("renormalize", &renormalize);
    m.def("step_euler_maruyama", &step_euler_maruyama);
    m.def("step_rotation_splitting", &step_rotation_splitting);
    m.def(
        "integrate_path",
        [](const BlochVector& b0, const TimeGrid& grid, const std::vector<double>& increments,
           const AlphaModel& model, double beta, Scheme scheme) {
            return integrate_path(b0, grid, increments, model, beta, scheme);
        },
        py::arg("b0"), py::arg("grid"), py::arg("increments"), py::arg("model"), py::arg("beta"),
        py::arg("scheme"));

    py::class_<FirstMoments>(m, "FirstMoments")
        .def_readonly("mean_x", &FirstMoments::mean_x)
        .def_readonly("mean_y", &FirstMoments::mean_y)
        .def_readonly("mean_z", &FirstMoments::mean_z);

    py::class_<SecondMoments>(m, "SecondMoments")
        .def(py::init([](double zz, double yy, double yz) {
                 return SecondMoments{zz, yy, yz};
             }),
             py::arg("zz"), py::arg("yy"), py::arg("yz"))
        .def_readonly("zz", &SecondMoments::zz)
        .def_readonly("yy", &SecondMoments::yy)
        .def_readonly("yz", &SecondMoments::yz)
        .def("xx", &SecondMoments::xx);

    py::enum_<Regime>(m, "Regime")
        .value("underdamped", Regime::underdamped)
        .value("overdamped", Regime::overdamped)
        .value("critical", Regime::critical);

    m.def("classify_regime", &classify_regime);
    m.def("first_moments_closed_form", &first_moments_closed_form);
    m.def("first_moments_ode", &first_moments_ode);
    m.def("second_moments_ode", &second_moments_ode);
    m.def("stationary_second_moments", &stationary_second_moments);
    m.def("slow_relaxation_rate", &slow_relaxation_rate);
    m.def("decoherence_limit", &decoherence_limit);

    py::class_<LocalizationSeries>(m, "LocalizationSeries")
        .def_readonly("times", &LocalizationSeries::times)
        .def_readonly("values", &LocalizationSeries::values);

    py::class_<Histogram>(m, "Histogram")
        .def_readonly("bin_edges", &Histogram::bin_edges)
        .def_readonly("counts", &Histogram::counts)
        .def_readonly("total", &Histogram::total);

    py::class_<TailFit>(m, "TailFit")
        .def_readonly("gamma", &TailFit::gamma)
        .def_readonly("residual", &TailFit::residual)
        .def_readonly("bins_used", &TailFit::bins_used);

    py::class_<FluxEstimate>(m, "FluxEstimate")
        .def_readonly("value", &FluxEstimate::value)
        .def_readonly("std_error", &FluxEstimate::std_error)
        .def_readonly("n_in_band", &FluxEstimate::n_in_band);

    m.def("localization_average", &localization_average);
    m.def("pole_occupancy", &pole_occupancy);
    m.def("z_histogram",
          [](const std::vector<double>& samples, const std::vector<double>& edges) {
              return z_histogram(samples, edges);
          });
    m.def("tail_exponent", &tail_exponent);
    m.def("meridian_flux",
          [](const std::vector<BlochVector>& snapshot, double z_c, double bandwidth) {
              return meridian_flux(snapshot, z_c, bandwidth);
          });
    m.def("transition_count", &transition_count);

    py::class_<NoisePath>(m, "NoisePath")
        .def_readonly("seed", &NoisePath::seed)
        .def_readonly("dt", &NoisePath::dt)
        .def_readonly("increments", &NoisePath::increments);

    m.def("brownian_path", &brownian_path);
    m.def("derive_path_seed", &derive_path_seed);

    py::class_<EnsembleStats>(m, "EnsembleStats")
        .def_readonly("grid", &EnsembleStats::grid)
        .def_readonly("n", &EnsembleStats::n)
        .def("mean", &EnsembleStats::mean)
        .def("second", &EnsembleStats::second)
        .def("mean_xx", &EnsembleStats::mean_xx);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init([](const AlphaModel& model, double beta, const BlochVector& b0,
                         const TimeGrid& grid, Scheme scheme, std::uint64_t n_paths,
                         std::uint64_t base_seed, unsigned n_workers) {
                 return RunConfig{model, beta, b0, grid, scheme, n_paths, base_seed, n_workers};
             }),
             py::arg("model"), py::arg("beta"), py::arg("b0"), py::arg("grid"), py::arg("scheme"),
             py::arg("n_paths"), py::arg("base_seed"), py::arg("n_workers") = 0);

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("mean_err", &ErrorReport::mean_err)
        .def_readonly("second_err", &ErrorReport::second_err)
        .def_readonly("max_mean_error", &ErrorReport::max_mean_error)
        .def_readonly("avg_mean_error", &ErrorReport::avg_mean_error)
        .def_readonly("max_second_error", &ErrorReport::max_second_error)
        .def_readonly("avg_second_error", &ErrorReport::avg_second_error);

    m.def("run_ensemble", &run_ensemble, py::call_guard<py::gil_scoped_release>());
    m.def("terminal_snapshot", &terminal_snapshot, py::call_guard<py::gil_scoped_release>());
    m.def("merge_stats", &merge_stats);
    m.def("compare_to_analytic", &compare_to_analytic);

#ifdef BLOCHSIM_VERSION
    m.attr("__version__") = BLOCHSIM_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
