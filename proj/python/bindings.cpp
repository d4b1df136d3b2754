#include "rdesplit/commands.hpp"
#include "rdesplit/config.hpp"
#include "rdesplit/convergence.hpp"
#include "rdesplit/errors.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace rdesplit;

namespace {

Matrix stack(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t j = 0; j < rows.size(); ++j) out.row(static_cast<Eigen::Index>(j)) = rows[j].transpose();
    return out;
}

SampledPath make_path(std::vector<double> times, Matrix values) {
    SampledPath p{std::move(times), std::move(values)};
    p.validate();
    return p;
}

py::tuple path_tuple(const SampledPath& p) { return py::make_tuple(p.times, p.values); }

Displacement displacement(const std::string& kind) {
    if (kind == "sign") return Displacement::Sign;
    if (kind == "gaussian") return Displacement::Gaussian;
    throw InvalidArgument("displacement must be sign or gaussian");
}

}  // namespace

PYBIND11_MODULE(_rdesplit, m) {
    m.doc() = "Operator-splitting solver for rough differential equations.";

    static py::exception<NumericFailure> numeric_failure(m, "NumericFailure", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const NumericFailure& e) {
            py::object err = py::handle(numeric_failure.ptr())(e.what());
            err.attr("step") = e.step();
            PyErr_SetObject(numeric_failure.ptr(), err.ptr());
        } catch (const InvalidArgument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<Grid>(m, "Grid")
        .def(py::init<double, int>(), py::arg("T"), py::arg("N"))
        .def_property_readonly("final_time", &Grid::final_time)
        .def_property_readonly("steps", &Grid::steps)
        .def_property_readonly("step_size", &Grid::step_size)
        .def("point", &Grid::point)
        .def("points", &Grid::points);

    py::class_<RoughDriver, std::shared_ptr<RoughDriver>>(m, "RoughDriver")
        .def_property_readonly("dimension", &RoughDriver::dimension)
        .def_property_readonly("alpha", &RoughDriver::alpha)
        .def_property_readonly("start_time", &RoughDriver::start_time)
        .def_property_readonly("end_time", &RoughDriver::end_time)
        .def("increment", &RoughDriver::increment, py::arg("s"), py::arg("t"))
        .def("area", &RoughDriver::area, py::arg("s"), py::arg("t"));

    m.def(
        "lift_piecewise_linear",
        [](std::vector<double> times, Matrix values, double alpha) {
            return std::const_pointer_cast<RoughDriver>(
                std::static_pointer_cast<const RoughDriver>(lift_piecewise_linear(make_path(std::move(times), std::move(values)), alpha)));
        },
        py::arg("times"), py::arg("values"), py::arg("alpha") = 0.5,
        "Canonical lift of the piecewise-linear interpolation of (times, values).");
    m.def(
        "synth_midpoint_path",
        [](std::uint64_t seed, double alpha, int levels, int d, const std::string& kind) {
            return path_tuple(synth_midpoint_path(seed, alpha, levels, d, displacement(kind)));
        },
        py::arg("seed"), py::arg("alpha"), py::arg("levels"), py::arg("d"), py::arg("displacement") = "sign");
    m.def(
        "smooth_curve_path", [](int d, double T, int samples) { return path_tuple(smooth_curve_path(d, T, samples)); },
        py::arg("d"), py::arg("T"), py::arg("samples"));
    m.def(
        "chen_defect", [](const std::shared_ptr<RoughDriver>& x, double s, double u, double t) {
            return chen_defect(*x, s, u, t);
        },
        py::arg("driver"), py::arg("s"), py::arg("u"), py::arg("t"));
    m.def(
        "hoelder_seminorm",
        [](std::vector<double> times, Matrix values, double beta) {
            return hoelder_seminorm(make_path(std::move(times), std::move(values)), beta);
        },
        py::arg("times"), py::arg("values"), py::arg("beta"));

    py::class_<VectorField>(m, "VectorField")
        .def_property_readonly("name", &VectorField::name)
        .def_property_readonly("state_dim", &VectorField::state_dim)
        .def_property_readonly("driver_dim", &VectorField::driver_dim)
        .def_property_readonly("gamma", &VectorField::gamma)
        .def("value", &VectorField::value, py::arg("y"))
        .def("gradient", &VectorField::gradient, py::arg("y"));
    m.def("zero_field", &zero_field, py::arg("n"), py::arg("d"), py::arg("gamma") = 3.0);
    m.def("constant_field", &constant_field, py::arg("value"), py::arg("gamma") = 3.0);
    m.def("linear_field_preset", &linear_field_preset, py::arg("n"), py::arg("d"), py::arg("seed"),
          py::arg("scale") = 0.5, py::arg("box_radius") = 2.0, py::arg("gamma") = 3.0);
    m.def("sine_field_preset", &sine_field_preset, py::arg("n"), py::arg("d"), py::arg("seed"), py::arg("scale") = 1.0,
          py::arg("gamma") = 3.0);

    py::class_<SecondOrderMap>(m, "SecondOrderMap")
        .def_property_readonly("name", &SecondOrderMap::name)
        .def("__call__", &SecondOrderMap::operator(), py::arg("x"), py::arg("s"), py::arg("t"));
    m.def(
        "canonical_z", [](const VectorField& f, const std::shared_ptr<RoughDriver>& x) { return canonical_z(f, x); },
        py::arg("field"), py::arg("driver"));
    m.def(
        "transposed_z", [](const VectorField& f, const std::shared_ptr<RoughDriver>& x) { return transposed_z(f, x); },
        py::arg("field"), py::arg("driver"));
    m.def("zero_z", &zero_z, py::arg("n"));
    m.def("rough_z", &rough_z, py::arg("n"), py::arg("exponent"), py::arg("scale") = 1.0);

    py::class_<SplitTrajectory>(m, "SplitTrajectory")
        .def_property_readonly("grid", &SplitTrajectory::grid)
        .def_property_readonly("u", [](const SplitTrajectory& t) { return stack(t.u()); })
        .def_property_readonly("v", [](const SplitTrajectory& t) { return stack(t.v()); })
        .def("eval_joined", &SplitTrajectory::eval_joined, py::arg("t"));

    m.def(
        "solve_split",
        [](const std::shared_ptr<RoughDriver>& x, const VectorField& f, const SecondOrderMap& z, const Vector& y0,
           double T, int N) { return solve_split(x, f, z, y0, Grid(T, N)); },
        py::arg("driver"), py::arg("field"), py::arg("z"), py::arg("y0"), py::arg("T"), py::arg("N"),
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "solve_milstein",
        [](const std::shared_ptr<RoughDriver>& x, const VectorField& f, const SecondOrderMap& z, const Vector& y0,
           double T, int N) { return stack(solve_milstein(x, f, z, y0, Grid(T, N)).values); },
        py::arg("driver"), py::arg("field"), py::arg("z"), py::arg("y0"), py::arg("T"), py::arg("N"),
        py::call_guard<py::gil_scoped_release>());

    py::class_<Problem>(m, "Problem")
        .def(py::init([](const std::shared_ptr<RoughDriver>& x, VectorField f, SecondOrderMap z, Vector y0, double T) {
                 return Problem{x, std::move(f), std::move(z), std::move(y0), T};
             }),
             py::arg("driver"), py::arg("field"), py::arg("z"), py::arg("y0"), py::arg("T") = 1.0)
        .def_property_readonly("alpha", &Problem::alpha)
        .def_property_readonly("gamma", &Problem::gamma)
        .def_readonly("y0", &Problem::y0)
        .def_readonly("T", &Problem::T);

    py::class_<RateReport>(m, "RateReport")
        .def_readonly("levels", &RateReport::levels)
        .def_readonly("step_sizes", &RateReport::step_sizes)
        .def_readonly("diffs", &RateReport::diffs)
        .def_readonly("slope", &RateReport::slope)
        .def_readonly("target", &RateReport::target)
        .def_readonly("sup_diffs", &RateReport::sup_diffs)
        .def_readonly("common_diffs", &RateReport::common_diffs)
        .def_readonly("sampling", &RateReport::sampling)
        .def_property_readonly("norm_kind", &norm_kind_name);

    py::class_<DavieReport>(m, "DavieReport")
        .def_readonly("h", &DavieReport::h)
        .def_readonly("max_ratio", &DavieReport::max_ratio)
        .def_readonly("k", &DavieReport::k)
        .def_readonly("m", &DavieReport::m)
        .def_readonly("pairs", &DavieReport::pairs);

    py::class_<SchemeGapReport>(m, "SchemeGapReport")
        .def_readonly("levels", &SchemeGapReport::levels)
        .def_readonly("gaps", &SchemeGapReport::gaps)
        .def_readonly("slope", &SchemeGapReport::slope);

    const auto release = py::call_guard<py::gil_scoped_release>();
    m.def("dyadic_sup_rate", &dyadic_sup_rate, py::arg("problem"), py::arg("base_N"), py::arg("levels"), release);
    m.def("holder_rate", &holder_rate, py::arg("problem"), py::arg("beta"), py::arg("base_N"), py::arg("levels"),
          release);
    m.def("rational_rate", &rational_rate, py::arg("problem"), py::arg("q_num"), py::arg("q_den"), py::arg("base_N"),
          py::arg("levels"), release);
    m.def("compare_schemes", &compare_schemes, py::arg("problem"), py::arg("base_N"), py::arg("levels"), release);
    m.def("common_time_indices", &common_time_indices, py::arg("N"), py::arg("q_num"), py::arg("q_den"));
    m.def(
        "fit_rate", [](const std::vector<double>& x, const std::vector<double>& d) { return fit_rate(x, d); },
        py::arg("x"), py::arg("diffs"));
    m.attr("EXACT_AGREEMENT") = kExactAgreement;
    m.def(
        "davie_defect",
        [](const SplitTrajectory& traj, const VectorField& f, const SecondOrderMap& z, double gamma, double alpha) {
            return davie_defect(traj, f, z, traj.driver(), gamma, alpha);
        },
        py::arg("trajectory"), py::arg("field"), py::arg("z"), py::arg("gamma"), py::arg("alpha"), release);

    m.def(
        "load_problem",
        [](const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
            const ProblemConfig config = load_config(path);
            validate_config(config);
            return build_problem(config, path.parent_path(), seed);
        },
        py::arg("config"), py::arg("seed") = py::none());
    m.def(
        "run_command",
        [](const std::string& command, const std::filesystem::path& config, const std::filesystem::path& out,
           std::optional<std::uint64_t> seed, bool oracle, const std::string& kind) {
            RunOptions options{config, out, seed, oracle, kind};
            std::ostringstream log, err;
            int code;
            {
                py::gil_scoped_release unlocked;
                code = run_command(command, options, log, err);
            }
            return py::make_tuple(code, log.str(), err.str());
        },
        py::arg("command"), py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("oracle") = false,
        py::arg("kind") = "sup", "Runs a CLI subcommand; returns (exit_code, log, errors).");
}
