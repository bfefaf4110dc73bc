#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "qfc/cli.hpp"
#include "qfc/trajectory.hpp"

namespace py = pybind11;
using namespace qfc;

PYBIND11_MODULE(_core, m) {
    m.doc() = "qfc native core";
    m.attr("__version__") = "0.1.0";

    py::class_<BlochVector>(m, "BlochVector")
        .def(py::init<>())
        .def(py::init([](double x, double y, double z) { return BlochVector{x, y, z}; }),
             py::arg("x"), py::arg("y"), py::arg("z"))
        .def_readwrite("x", &BlochVector::x)
        .def_readwrite("y", &BlochVector::y)
        .def_readwrite("z", &BlochVector::z)
        .def("norm", &BlochVector::norm)
        .def("dot", &BlochVector::dot)
        .def("__iter__",
             [](const BlochVector& s) { return py::iter(py::make_tuple(s.x, s.y, s.z)); })
        .def("__eq__", [](const BlochVector& a, const BlochVector& b) { return a == b; })
        .def("__repr__", [](const BlochVector& s) {
            std::ostringstream os;
            os.precision(17);
            os << "BlochVector(" << s.x << ", " << s.y << ", " << s.z << ")";
            return os.str();
        });

    py::class_<PureState>(m, "PureState")
        .def(py::init<>())
        .def(py::init<Complex, Complex>(), py::arg("excited"), py::arg("ground"))
        .def_property_readonly("excited", &PureState::excited)
        .def_property_readonly("ground", &PureState::ground)
        .def("__eq__", [](const PureState& a, const PureState& b) { return a == b; });

    m.def("bloch_from_state", &bloch_from_state);
    m.def("state_from_bloch", &state_from_bloch);
    m.def("angle_of", [](const BlochVector& s) { return angle_of(s).radians(); });
    m.def("fidelity", &fidelity);

    py::enum_<UpdateMode>(m, "UpdateMode")
        .value("EXACT", UpdateMode::Exact)
        .value("FIRST_ORDER", UpdateMode::FirstOrder);

    py::class_<HomodyneConfig>(m, "HomodyneConfig")
        .def(py::init<>())
        .def(py::init([](double alpha2, double gamma_tau, UpdateMode mode) {
                 return HomodyneConfig::from_alpha2(alpha2, gamma_tau, mode);
             }),
             py::arg("alpha2"), py::arg("gamma_tau"), py::arg("mode") = UpdateMode::Exact)
        .def_property_readonly("alpha", &HomodyneConfig::alpha)
        .def_property_readonly("alpha2", &HomodyneConfig::alpha2)
        .def_property_readonly("gamma_tau", &HomodyneConfig::gamma_tau)
        .def_property_readonly("mode", &HomodyneConfig::mode)
        .def("kappa", &HomodyneConfig::kappa);

    py::class_<FeedbackLaw>(m, "FeedbackLaw")
        .def(py::init<>())
        .def(py::init<double, bool>(), py::arg("theta_bar"), py::arg("enabled") = true)
        .def_property_readonly("theta_bar", &FeedbackLaw::theta_bar)
        .def_property_readonly("enabled", &FeedbackLaw::enabled)
        .def("target", &FeedbackLaw::target);

    py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

    py::class_<MeasurementOutcome>(m, "MeasurementOutcome")
        .def_readonly("dn_total", &MeasurementOutcome::dn_total)
        .def_readonly("dn_qf", &MeasurementOutcome::dn_qf)
        .def_readonly("shift", &MeasurementOutcome::shift);

    m.def("sample_outcome", &sample_outcome, py::arg("shift"), py::arg("cfg"), py::arg("rng"));
    m.def("conditioned_update_exact", &conditioned_update_exact, py::arg("psi"), py::arg("dn"),
          py::arg("cfg"));
    m.def("diffusion_step_first_order", &diffusion_step_first_order, py::arg("s"), py::arg("dn"),
          py::arg("cfg"));
    m.def("combined_diffusion_step", &combined_diffusion_step, py::arg("s"), py::arg("dn"),
          py::arg("law"), py::arg("cfg"));
    m.def("feedback_amplitude", &feedback_amplitude, py::arg("dn_qf"), py::arg("law"),
          py::arg("cfg"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("homodyne", &SimConfig::homodyne)
        .def_readwrite("law", &SimConfig::law)
        .def_readwrite("initial", &SimConfig::initial)
        .def_readwrite("steps", &SimConfig::steps)
        .def_readwrite("trajectories", &SimConfig::trajectories)
        .def_readwrite("master_seed", &SimConfig::master_seed)
        .def_readwrite("delay", &SimConfig::delay)
        .def_readwrite("record_stride", &SimConfig::record_stride)
        .def_readwrite("allow_long_run", &SimConfig::allow_long_run)
        .def("validate", &SimConfig::validate);

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("step", &StepRecord::step)
        .def_readonly("bloch", &StepRecord::bloch)
        .def_readonly("dn_total", &StepRecord::dn_total)
        .def_readonly("dn_qf", &StepRecord::dn_qf)
        .def_readonly("shift", &StepRecord::shift);

    py::class_<EnsemblePoint>(m, "EnsemblePoint")
        .def_readonly("step", &EnsemblePoint::step)
        .def_readonly("gamma_t", &EnsemblePoint::gamma_t)
        .def_readonly("mean", &EnsemblePoint::mean)
        .def_readonly("variance", &EnsemblePoint::variance)
        .def_readonly("std_error", &EnsemblePoint::std_error)
        .def_readonly("angle_variance", &EnsemblePoint::angle_variance)
        .def_readonly("fidelity", &EnsemblePoint::fidelity)
        .def_readonly("purity", &EnsemblePoint::purity);

    m.def(
        "run_trajectory",
        [](const SimConfig& cfg, std::uint64_t index) { return run_trajectory(cfg, index).steps; },
        py::arg("cfg"), py::arg("index") = 0, py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_ensemble",
        [](const SimConfig& cfg, unsigned threads) { return run_ensemble(cfg, {threads}).points; },
        py::arg("cfg"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def(
        "master_evolve",
        [](const BlochVector& u, double gamma_t) {
            return master_evolve(DensityMatrix2(u), gamma_t).bloch();
        },
        py::arg("u"), py::arg("gamma_t"));

    m.def(
        "cli_run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in process; returns (code, stdout, stderr).");

}
