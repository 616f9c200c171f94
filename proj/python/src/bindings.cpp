// Python module: thin wrappers that take and return numpy arrays and plain
// dicts. Library errors surface as exception classes of the same name.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "opkit/bvp.hpp"
#include "opkit/conformance.hpp"
#include "opkit/linops.hpp"
#include "opkit/pencil.hpp"
#include "opkit/pinv.hpp"
#include "opkit/spectral.hpp"

namespace py = pybind11;
using namespace opkit;

namespace {

py::object opt(const std::optional<double>& x) { return x ? py::cast(*x) : py::none(); }

PerturbationSide side_from(const std::string& s) {
  if (s == "automatic") return PerturbationSide::automatic;
  if (s == "range") return PerturbationSide::range_side;
  if (s == "kernel") return PerturbationSide::kernel_side;
  throw ParameterError("side must be 'automatic', 'range' or 'kernel'");
}

py::dict certificate_dict(const PerturbationCertificate& c) {
  py::dict d;
  d["mode"] = to_string(c.mode);
  d["range_inclusion_residual"] = c.range_inclusion_residual;
  d["kernel_inclusion_residual"] = c.kernel_inclusion_residual;
  d["contraction_TdS"] = c.contraction_TdS;
  d["contraction_STd"] = c.contraction_STd;
  d["t_accretive"] = c.t_accretive;
  d["s_accretive"] = c.s_accretive;
  d["theta"] = opt(c.theta);
  return d;
}

Matrix stack(const std::vector<Vector>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

py::dict solution_dict(const BvpSolution& s) {
  py::dict d;
  d["grid"] = s.grid;
  d["values"] = stack(s.values);
  d["x0"] = s.x0;
  d["x1"] = s.x1;
  d["boundary_residual"] = s.boundary_residual;
  d["ode_residual"] = s.ode_residual;
  d["derivative_gap"] = s.derivative_gap;
  d["resonance_margin"] = s.resonance_margin;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Accretive operators, pseudoinverses and quadratic pencils";

  // translators run newest first, so the base class goes in first
  const py::object base = py::register_exception<Error>(m, "OpkitError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<ParameterError>(m, "ParameterError", base);
  py::register_exception<PreconditionError>(m, "PreconditionError", base);
  py::register_exception<HypothesisError>(m, "HypothesisError", base);
  py::register_exception<ResonanceError>(m, "ResonanceError", base);
  py::register_exception<AccuracyError>(m, "AccuracyError", base);
  py::register_exception<NoPrincipalRootError>(m, "NoPrincipalRootError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ModelError>(m, "ModelError", base);

  m.def(
      "pseudoinverse",
      [](const Matrix& t, double rank_tol) {
        const auto r = pseudoinverse(Operator(t), rank_tol);
        py::dict d;
        d["pinv"] = r.pinv.matrix();
        d["rank"] = r.rank;
        d["singular_values"] = r.singular_values;
        d["gamma"] = r.gamma;
        return d;
      },
      py::arg("t"), py::arg("rank_tol") = -1.0);

  m.def(
      "accretivity_report",
      [](const Matrix& t) {
        const auto r = accretivity_report(Operator(t));
        py::dict d;
        d["delta"] = r.delta;
        d["is_accretive"] = r.is_accretive;
        d["status"] = to_string(r.status);
        d["omega"] = opt(r.omega);
        d["lambda0_modulus"] = opt(r.lambda0_modulus);
        d["bound_rhs"] = opt(r.bound_rhs);
        d["numerical_radius"] = r.numerical_radius;
        d["operator_norm"] = r.operator_norm;
        d["spectral_radius"] = r.spectral_radius;
        return d;
      },
      py::arg("t"));

  m.def("numerical_radius", [](const Matrix& t) { return numerical_radius(Operator(t)); }, py::arg("t"));

  m.def(
      "perturbation_certificate",
      [](const Matrix& t, const Matrix& s) { return certificate_dict(perturbation_certificate(Operator(t), Operator(s))); },
      py::arg("t"), py::arg("s"));

  m.def(
      "perturbed_pinv",
      [](const Matrix& t, const Matrix& s, const std::string& side) {
        const Operator ot(t), os(s);
        return perturbed_pinv(ot, os, perturbation_certificate(ot, os), side_from(side)).matrix();
      },
      py::arg("t"), py::arg("s"), py::arg("side") = "automatic");

  m.def("accretive_sqrt", [](const Matrix& u) { return accretive_sqrt(Operator(u)).matrix(); }, py::arg("u"));

  m.def(
      "fractional_power",
      [](const Matrix& t, double alpha) { return balakrishnan_power(Operator(t), alpha).value.matrix(); },
      py::arg("t"), py::arg("alpha"));

  m.def(
      "factorize",
      [](const Matrix& t, const Matrix& s) {
        const auto f = factorize(QuadraticPencil(Operator(t), Operator(s)));
        py::dict d;
        d["upsilon"] = f.upsilon.matrix();
        d["sqrt_upsilon"] = f.sqrt_upsilon.matrix();
        d["z1"] = f.z1.matrix();
        d["z2"] = f.z2.matrix();
        d["separation"] = f.separation;
        d["commuting"] = f.commuting;
        d["spectra_z1"] = f.spectra_z1;
        d["spectra_z2"] = f.spectra_z2;
        d["warnings"] = f.warnings;
        return d;
      },
      py::arg("t"), py::arg("s"));

  m.def(
      "solve_bvp",
      [](const Matrix& t, const Matrix& s, const Vector& u0, const Vector& u1, int grid_points) {
        const auto p = make_bvp_problem(Operator(t), Operator(s), u0, u1);
        return solution_dict(solve_bvp(p, chebyshev_grid(grid_points)));
      },
      py::arg("t"), py::arg("s"), py::arg("u0"), py::arg("u1"), py::arg("grid_points") = 65);

  m.def(
      "demo_laplacian",
      [](double eta, double eta1, Complex xi, int n_modes, int grid_points, int x_samples) {
        LaplacianModel model;
        model.eta = eta;
        model.eta1 = eta1;
        model.xi = xi;
        model.n_modes = n_modes;
        const auto [u0, u1] = default_boundary_data(n_modes);
        const auto r = demo(model, u0, u1, chebyshev_grid(grid_points), x_samples);
        py::dict d;
        d["condition_holds"] = r.condition.holds;
        d["condition_sum"] = r.condition.sum;
        d["certificate"] = certificate_dict(r.certificate);
        d["oracle_gap"] = r.oracle_gap;
        d["solution"] = solution_dict(r.solution);
        return d;
      },
      py::arg("eta") = 1.0, py::arg("eta1") = 0.0, py::arg("xi") = Complex(0.1), py::arg("n_modes") = 16,
      py::arg("grid_points") = 65, py::arg("x_samples") = 33);

  m.def(
      "conformance_json",
      [](std::uint64_t seed, std::vector<int> criteria) {
        ConformanceOptions o;
        o.seed = seed;
        const auto r = criteria.empty() ? run_conformance(o) : run_conformance_subset(o, criteria);
        return conformance_body(r).dump();
      },
      py::arg("seed") = 42, py::arg("criteria") = std::vector<int>{});
}
