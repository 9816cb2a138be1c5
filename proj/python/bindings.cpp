// Python bindings for the theta-scheme solver: grid and FEM operators,
// Q-Wiener sampling, implicit stepping, trajectory runs and the
// Monte Carlo experiment drivers.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "snls/config.hpp"
#include "snls/diagnostics.hpp"
#include "snls/errors.hpp"
#include "snls/experiment.hpp"
#include "snls/selftest.hpp"

namespace py = pybind11;
using namespace snls;

namespace {

ComplexField field_from_values(const Grid1D& grid, std::vector<cplx> values) {
    if (values.size() != grid.n_interior()) {
        throw std::invalid_argument("field_from_values: expected one value per interior node");
    }
    ComplexField f;
    f.values = std::move(values);
    f.grid_id = grid.id();
    return f;
}

} // namespace

PYBIND11_MODULE(snls, m) {
    m.doc() = "1D stochastic cubic Schrodinger theta-scheme solver";

    py::register_exception<NonConvergenceError>(m, "NonConvergenceError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<ExperimentError>(m, "ExperimentError");

    py::class_<Grid1D>(m, "Grid1D")
        .def_property_readonly("a", &Grid1D::a)
        .def_property_readonly("b", &Grid1D::b)
        .def_property_readonly("n_cells", &Grid1D::n_cells)
        .def_property_readonly("h", &Grid1D::h)
        .def_property_readonly("n_interior", &Grid1D::n_interior)
        .def_property_readonly("interior_nodes",
                               [](const Grid1D& g) {
                                   return std::vector<double>(g.interior_nodes().begin(),
                                                              g.interior_nodes().end());
                               })
        .def("__repr__", [](const Grid1D& g) {
            std::ostringstream os;
            os << "Grid1D(a=" << g.a() << ", b=" << g.b() << ", n_cells=" << g.n_cells() << ")";
            return os.str();
        });
    m.def("build_grid", &build_grid, py::arg("a"), py::arg("b"), py::arg("n_cells"));

    py::class_<ComplexField>(m, "ComplexField")
        .def_property_readonly("values", [](const ComplexField& f) { return f.values; })
        .def("__len__", &ComplexField::size);
    m.def("zero_field", &zero_field);
    m.def("field_from_values", &field_from_values, py::arg("grid"), py::arg("values"));
    m.def(
        "interpolate",
        [](const std::function<cplx(double)>& f, const Grid1D& grid) {
            return interpolate(f, grid);
        },
        py::arg("f"), py::arg("grid"));

    py::class_<TriDiagMatrix>(m, "TriDiagMatrix")
        .def_readonly("diag", &TriDiagMatrix::diag)
        .def_readonly("off", &TriDiagMatrix::off)
        .def("apply",
             [](const TriDiagMatrix& t, const std::vector<cplx>& in) { return t.apply(in); });
    m.def("assemble_mass", &assemble_mass);
    m.def("assemble_stiffness", &assemble_stiffness);

    m.def("l2_norm_sq", &l2_norm_sq);
    m.def("h1_seminorm_sq", &h1_seminorm_sq);
    m.def("l4_norm4", &l4_norm4);
    m.def("mass", &mass);
    m.def("hamiltonian", &hamiltonian, py::arg("u"), py::arg("A"), py::arg("grid"),
          py::arg("lambda_") = -1);
    m.def("h2_proxy_sq", &h2_proxy_sq);

    py::enum_<CoeffRule>(m, "CoeffRule")
        .value("one_over_ell", CoeffRule::OneOverEll)
        .value("custom", CoeffRule::Custom);
    py::class_<NoiseModel>(m, "NoiseModel")
        .def_property_readonly("n_modes", &NoiseModel::n_modes)
        .def_property_readonly("nu", &NoiseModel::nu)
        .def_property_readonly("coeffs", &NoiseModel::coeffs);
    m.def("make_noise_model", &make_noise_model, py::arg("n_modes"), py::arg("nu"),
          py::arg("rule"), py::arg("grid"), py::arg("custom_coeffs") = std::vector<double>{});

    py::class_<WienerPath>(m, "WienerPath")
        .def_readonly("tau", &WienerPath::tau)
        .def_readonly("n_steps", &WienerPath::n_steps)
        .def_readonly("n_modes", &WienerPath::n_modes)
        .def_readonly("increments", &WienerPath::increments);
    m.def("sample_path", &sample_path, py::arg("model"), py::arg("seed"), py::arg("tau"),
          py::arg("n_steps"));
    m.def("expand_increment", &expand_increment);
    m.def("coarsen", &coarsen);
    m.def("f_q", &f_q);

    py::class_<ThetaPolicy>(m, "ThetaPolicy")
        .def_static("fixed", &ThetaPolicy::fixed)
        .def_static("half_plus_c_sqrt_tau", &ThetaPolicy::half_plus_c_sqrt_tau,
                    py::arg("c") = 1.0);
    m.def("resolve_theta", &resolve_theta);

    py::enum_<NonlinearQuadrature>(m, "NonlinearQuadrature")
        .value("lumped", NonlinearQuadrature::Lumped)
        .value("consistent_mass", NonlinearQuadrature::ConsistentMass);

    py::class_<SchemeParams>(m, "SchemeParams")
        .def(py::init<>())
        .def_readwrite("lambda_", &SchemeParams::lambda)
        .def_readwrite("theta_policy", &SchemeParams::theta_policy)
        .def_readwrite("tau", &SchemeParams::tau)
        .def_readwrite("newton_tol", &SchemeParams::newton_tol)
        .def_readwrite("newton_max_iter", &SchemeParams::newton_max_iter)
        .def_readwrite("quadrature", &SchemeParams::quadrature);

    py::class_<StepReport>(m, "StepReport")
        .def_readonly("newton_iters", &StepReport::newton_iters)
        .def_readonly("final_residual", &StepReport::final_residual)
        .def_readonly("theta_used", &StepReport::theta_used);

    m.def(
        "residual",
        [](const ComplexField& u, const ComplexField& phi_n, const std::vector<double>& dW,
           double theta, const SchemeParams& params, const TriDiagMatrix& M,
           const TriDiagMatrix& A, const Grid1D& grid) {
            return residual(u, phi_n, dW, theta, params, M, A, grid);
        },
        py::arg("u"), py::arg("phi_n"), py::arg("dW"), py::arg("theta"), py::arg("params"),
        py::arg("M"), py::arg("A"), py::arg("grid"));
    m.def(
        "solve_step",
        [](const ComplexField& phi_n, const std::vector<double>& dW, const SchemeParams& params,
           const TriDiagMatrix& M, const TriDiagMatrix& A, const Grid1D& grid) {
            return solve_step(phi_n, dW, params, M, A, grid);
        },
        py::arg("phi_n"), py::arg("dW"), py::arg("params"), py::arg("M"), py::arg("A"),
        py::arg("grid"));

    py::class_<StepDiagnostics>(m, "StepDiagnostics")
        .def_readonly("time", &StepDiagnostics::time)
        .def_readonly("mass", &StepDiagnostics::mass)
        .def_readonly("hamiltonian", &StepDiagnostics::hamiltonian)
        .def_readonly("h1_semi_sq", &StepDiagnostics::h1_semi_sq)
        .def_readonly("h2_proxy_sq", &StepDiagnostics::h2_proxy_sq)
        .def_readonly("newton_iters", &StepDiagnostics::newton_iters);
    py::class_<Snapshot>(m, "Snapshot")
        .def_readonly("step", &Snapshot::step)
        .def_readonly("time", &Snapshot::time)
        .def_readonly("values", &Snapshot::values);
    py::class_<TrajectoryResult>(m, "TrajectoryResult")
        .def_readonly("final_field", &TrajectoryResult::final_field)
        .def_readonly("steps", &TrajectoryResult::steps)
        .def_readonly("snapshots", &TrajectoryResult::snapshots);
    m.def("run_trajectory", &run_trajectory, py::arg("psi0"), py::arg("path"), py::arg("model"),
          py::arg("params"), py::arg("grid"), py::arg("M"), py::arg("A"),
          py::arg("snapshot_steps") = std::vector<std::size_t>{});

    m.def("estimate_order", [](const std::vector<double>& taus, const std::vector<double>& errs) {
        return estimate_order(taus, errs);
    });

    py::class_<ThetaPolicySpec>(m, "ThetaPolicySpec")
        .def_readonly("label", &ThetaPolicySpec::label)
        .def_readonly("policy", &ThetaPolicySpec::policy);
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("realizations", &ExperimentConfig::realizations)
        .def_readwrite("base_seed", &ExperimentConfig::base_seed)
        .def_readwrite("tau_list", &ExperimentConfig::tau_list)
        .def_readwrite("tau_ref", &ExperimentConfig::tau_ref)
        .def("validate", &ExperimentConfig::validate);
    m.def("load_config", &load_config);
    m.def("parse_config", [](const std::string& text, const std::string& name) {
        std::istringstream is(text);
        return parse_config(is, name);
    });
    m.def("apply_override", &apply_override);

    py::class_<ErrorTableRow>(m, "ErrorTableRow")
        .def_readonly("tau", &ErrorTableRow::tau)
        .def_readonly("rms_error", &ErrorTableRow::rms_error)
        .def_readonly("n_realizations", &ErrorTableRow::n_realizations)
        .def_readonly("n_failures", &ErrorTableRow::n_failures);
    py::class_<ErrorTable>(m, "ErrorTable")
        .def_readonly("rows", &ErrorTable::rows)
        .def_readonly("fitted_order", &ErrorTable::fitted_order)
        .def_readonly("fit_residual", &ErrorTable::fit_residual);
    m.def("strong_error_experiment", &strong_error_experiment, py::arg("config"),
          py::arg("n_workers") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<EnsembleStats>(m, "EnsembleStats")
        .def_readonly("times", &EnsembleStats::times)
        .def_readonly("mean_mass", &EnsembleStats::mean_mass)
        .def_readonly("mean_hamiltonian", &EnsembleStats::mean_hamiltonian)
        .def_readonly("mean_h1_semi_sq", &EnsembleStats::mean_h1_semi_sq)
        .def_readonly("mean_h2_proxy_sq", &EnsembleStats::mean_h2_proxy_sq)
        .def_readonly("mass_drift", &EnsembleStats::mass_drift)
        .def_readonly("max_mean_hamiltonian", &EnsembleStats::max_mean_hamiltonian)
        .def_readonly("max_abs_mass_drift", &EnsembleStats::max_abs_mass_drift)
        .def_readonly("h1_max_quantiles", &EnsembleStats::h1_max_quantiles)
        .def_readonly("n_realizations", &EnsembleStats::n_realizations)
        .def_readonly("n_failures", &EnsembleStats::n_failures);
    py::class_<InvariantRun>(m, "InvariantRun")
        .def_readonly("theta_label", &InvariantRun::theta_label)
        .def_readonly("tau", &InvariantRun::tau)
        .def_readonly("theta_resolved", &InvariantRun::theta_resolved)
        .def_readonly("stats", &InvariantRun::stats);
    m.def("invariant_experiment", &invariant_experiment, py::arg("config"),
          py::arg("n_workers") = 0, py::call_guard<py::gil_scoped_release>());

    m.def("run_selftest", []() {
        std::ostringstream os;
        const bool ok = run_selftest(os);
        return py::make_tuple(ok, os.str());
    });
}
