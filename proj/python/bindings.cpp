#include "stator/analysis.hpp"
#include "stator/cli.hpp"
#include "stator/config.hpp"
#include "stator/dynamics.hpp"
#include "stator/error.hpp"
#include "stator/geometry.hpp"
#include "stator/holography.hpp"
#include "stator/modal.hpp"
#include "stator/reference_data.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace stator;

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(m, "StatorError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DiscretizationError>(m, "DiscretizationError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<StabilityError>(m, "StabilityError", base.ptr());
    py::register_exception<SamplingError>(m, "SamplingError", base.ptr());
    py::register_exception<UnwrapError>(m, "UnwrapError", base.ptr());
    py::register_exception<NoModeError>(m, "NoModeError", base.ptr());

    py::class_<StatorGeometry>(m, "StatorGeometry")
        .def(py::init<>())
        .def_readwrite("inner_radius", &StatorGeometry::inner_radius)
        .def_readwrite("outer_radius", &StatorGeometry::outer_radius)
        .def_readwrite("base_thickness", &StatorGeometry::base_thickness)
        .def_readwrite("total_height", &StatorGeometry::total_height)
        .def_readwrite("notch_count", &StatorGeometry::notch_count)
        .def_readwrite("notch_width", &StatorGeometry::notch_width)
        .def_readwrite("notch_depth", &StatorGeometry::notch_depth)
        .def_readwrite("tooth_band_inner_radius", &StatorGeometry::tooth_band_inner_radius)
        .def_readwrite("fixture_radius", &StatorGeometry::fixture_radius)
        .def("validate", &StatorGeometry::validate);

    py::class_<Material>(m, "Material")
        .def(py::init<>())
        .def_readwrite("youngs_modulus", &Material::youngs_modulus)
        .def_readwrite("poisson_ratio", &Material::poisson_ratio)
        .def_readwrite("density", &Material::density)
        .def_readwrite("modal_damping_ratio", &Material::modal_damping_ratio)
        .def("validate", &Material::validate);

    py::class_<EffectivePlate>(m, "EffectivePlate")
        .def_readonly("inner_radius", &EffectivePlate::inner_radius)
        .def_readonly("fixture_radius", &EffectivePlate::fixture_radius)
        .def_readonly("outer_radius", &EffectivePlate::outer_radius)
        .def_readonly("fill_factor", &EffectivePlate::fill_factor)
        .def("bending_stiffness", &EffectivePlate::bending_stiffness)
        .def("areal_mass", &EffectivePlate::areal_mass)
        .def_static("uniform", &EffectivePlate::uniform, py::arg("inner_radius"), py::arg("fixture_radius"),
                    py::arg("outer_radius"), py::arg("bending_stiffness"), py::arg("areal_mass"),
                    py::arg("poisson_ratio"), py::arg("damping_ratio") = 0.02);

    m.def("homogenize", &homogenize, py::arg("geometry"), py::arg("material"));
    m.def("notch_fill_factor", &notch_fill_factor);

    py::enum_<Orientation>(m, "Orientation")
        .value("cosine", Orientation::cosine)
        .value("sine", Orientation::sine);

    py::class_<Discretization>(m, "Discretization")
        .def(py::init<>())
        .def_readwrite("radial_nodes", &Discretization::radial_nodes)
        .def_readwrite("quadrature_order", &Discretization::quadrature_order);

    py::class_<Mode>(m, "Mode")
        .def_readonly("n", &Mode::n)
        .def_readonly("orientation", &Mode::orientation)
        .def_readonly("radial_order", &Mode::radial_order)
        .def_readonly("frequency", &Mode::frequency)
        .def_readonly("damping_ratio", &Mode::damping_ratio)
        .def("shape", [](const Mode& mode, double r, double theta) { return mode_shape_eval(mode, r, theta); })
        .def("__repr__", [](const Mode& mode) {
            std::ostringstream os;
            os << "Mode(n=" << mode.n << ", " << to_string(mode.orientation) << ", radial_order="
               << mode.radial_order << ", frequency=" << mode.frequency << ")";
            return os.str();
        });

    py::class_<ModalBasis>(m, "ModalBasis")
        .def_readonly("modes", &ModalBasis::modes)
        .def_readonly("provenance", &ModalBasis::provenance)
        .def("frequency_of", &ModalBasis::frequency_of, py::arg("n"), py::arg("radial_order") = 0)
        .def("max_frequency", &ModalBasis::max_frequency)
        .def("retain_below", &ModalBasis::retain_below);

    m.def("solve_modes", &solve_modes, py::arg("plate"), py::arg("n_max"), py::arg("modes_per_n"),
          py::arg("discretization") = Discretization{}, py::arg("n_min") = 0);

    py::class_<CalibrationTarget>(m, "CalibrationTarget")
        .def(py::init<>())
        .def_readwrite("n", &CalibrationTarget::n)
        .def_readwrite("frequency", &CalibrationTarget::frequency);
    py::class_<CalibratedPlate>(m, "CalibratedPlate")
        .def_readonly("plate", &CalibratedPlate::plate)
        .def_readonly("stiffness_scale", &CalibratedPlate::stiffness_scale);
    m.def("calibrate", &calibrate);
    m.def("with_damping", &with_damping, py::arg("basis"), py::arg("damping_ratio"), py::arg("n") = py::none());

    py::enum_<PhaseLayout>(m, "PhaseLayout")
        .value("two_phase_quadrature", PhaseLayout::two_phase_quadrature)
        .value("single_phase", PhaseLayout::single_phase);

    py::class_<DriveConfig>(m, "DriveConfig")
        .def(py::init<>())
        .def_readwrite("drive_frequency", &DriveConfig::drive_frequency)
        .def_readwrite("peak_to_peak_voltage", &DriveConfig::peak_to_peak_voltage)
        .def_readwrite("force_per_volt", &DriveConfig::force_per_volt)
        .def_readwrite("electrode_harmonic", &DriveConfig::electrode_harmonic)
        .def_readwrite("phase_layout", &DriveConfig::phase_layout);

    py::class_<ModalTrajectory>(m, "ModalTrajectory")
        .def_readonly("times", &ModalTrajectory::times)
        .def_readonly("q", &ModalTrajectory::q)
        .def_readonly("steady_state_amplitude", &ModalTrajectory::steady_state_amplitude)
        .def("q_at", &ModalTrajectory::q_at);

    py::class_<ProbePoint>(m, "ProbePoint")
        .def(py::init([](std::string id, double r, double theta) { return ProbePoint{std::move(id), r, theta}; }),
             py::arg("id"), py::arg("r"), py::arg("theta") = 0.0)
        .def_readonly("id", &ProbePoint::id)
        .def_readonly("r", &ProbePoint::r)
        .def_readonly("theta", &ProbePoint::theta);

    py::class_<ProbeSeries>(m, "ProbeSeries")
        .def_readonly("point", &ProbeSeries::point)
        .def_readonly("displacement", &ProbeSeries::displacement)
        .def_readonly("steady_amplitude", &ProbeSeries::steady_amplitude)
        .def_readonly("settling_time", &ProbeSeries::settling_time);

    m.def("steady_phasors", &steady_phasors);
    m.def("respond", &respond, py::arg("basis"), py::arg("drive"), py::arg("duration"), py::arg("dt"));
    m.def("probe", &probe);
    m.def("damping_for_settling", &damping_for_settling, py::arg("settling_time"), py::arg("frequency"),
          py::arg("band") = settling_band);
    m.def("steady_amplitude_at", &steady_amplitude_at);

    py::class_<OpticalConfig>(m, "OpticalConfig")
        .def(py::init<>())
        .def_readwrite("wavelength", &OpticalConfig::wavelength)
        .def_readwrite("sensitivity_factor", &OpticalConfig::sensitivity_factor)
        .def_readwrite("max_amplitude", &OpticalConfig::max_amplitude)
        .def_readwrite("phase_noise_sigma", &OpticalConfig::phase_noise_sigma)
        .def("sensitivity", &OpticalConfig::sensitivity);

    py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
        .def_readonly("width", &Grid::width)
        .def_readonly("height", &Grid::height)
        .def_readonly("r", &Grid::r)
        .def_readonly("theta", &Grid::theta)
        .def_static("polar", [](double inner, double outer, double r_min, double r_max, int n_radii, int n_theta) {
            return std::const_pointer_cast<Grid>(Grid::polar(inner, outer, r_min, r_max, n_radii, n_theta));
        })
        .def_static("cartesian", [](double inner, double outer, int pixels, double half_extent) {
            return std::const_pointer_cast<Grid>(Grid::cartesian(inner, outer, pixels, half_extent));
        });

    m.def("steady_amplitude_field",
          [](const ModalBasis& basis, const std::vector<std::complex<double>>& phasors, std::shared_ptr<Grid> grid) {
              return steady_amplitude_field(basis, phasors, grid).values;
          });
    m.def("time_averaged_intensity",
          [](std::shared_ptr<Grid> grid, const std::vector<double>& amplitude, const OpticalConfig& optics) {
              if (amplitude.size() != grid->size()) throw DomainError("amplitude size does not match the grid");
              return time_averaged(ScalarField{grid, amplitude}, optics).intensity;
          });
    m.def("wrap_phase", &wrap_phase);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("amplitude", &FitResult::amplitude)
        .def_readonly("n", &FitResult::n)
        .def_readonly("phase", &FitResult::phase)
        .def_readonly("offset", &FitResult::offset)
        .def_readonly("rms_residual", &FitResult::rms_residual);

    const auto circle = [](double radius, std::vector<double> theta, std::vector<double> values) {
        CircleSample s;
        s.radius = radius;
        s.theta = std::move(theta);
        s.values = std::move(values);
        return s;
    };
    m.def("fit_eq1",
          [circle](const std::vector<double>& theta, const std::vector<double>& values, int n, double radius) {
              return fit_eq1(circle(radius, theta, values), n);
          },
          py::arg("theta"), py::arg("values"), py::arg("n"), py::arg("radius") = 1.0);
    m.def("detect_mode_number",
          [circle](const std::vector<double>& theta, const std::vector<double>& values, int n_max) {
              return detect_mode_number(circle(1.0, theta, values), n_max);
          },
          py::arg("theta"), py::arg("values"), py::arg("n_max") = 0);
    m.def("crest_shift_deg", &crest_shift_deg);

    m.def("reference_rows", [] {
        std::vector<std::pair<std::string, std::vector<std::optional<double>>>> out;
        for (const auto& row : reference_frequencies())
            out.emplace_back(row.name, std::vector<std::optional<double>>(row.khz.begin(), row.khz.end()));
        return out;
    });
    m.def("comparison_report", &comparison_report);
    m.def("default_config_text", &default_config_text);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs the stator CLI in-process; returns (exit_code, stdout, stderr).");
}
