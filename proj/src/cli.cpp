#include "opkit/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <filesystem>
#include <numbers>
#include <ostream>

#include <CLI11.hpp>

#include "opkit/bvp.hpp"
#include "opkit/conformance.hpp"
#include "opkit/dense.hpp"
#include "opkit/io.hpp"
#include "opkit/linops.hpp"
#include "opkit/pencil.hpp"
#include "opkit/pinv.hpp"
#include "opkit/spectral.hpp"
#include "opkit/tolerances.hpp"

namespace opkit::cli {

namespace {

using io::Json;

constexpr const char* kFooter = R"(Files
  Matrices and vectors are JSON: {"format": 1, "kind": "matrix"|"vector",
  "dim": n, "entries": [[re, im], ...]} with row-major entries.

CSV columns
  analyze         boundary.csv   k, theta, re, im   (support points of W(T))
  factorize       spectra.csv    set, index, re, im (set = z1 | z2 | pencil)
  solve-bvp       solution.csv   t, re_1, im_1, ..., re_n, im_n
  demo-laplacian  field.csv      t, x, re_u, im_u

Exit status
  0 all asserted properties hold, 1 numerical failure (claim id printed),
  2 parse error, 3 hypothesis / resonance / model-screen failure.)";

struct Options {
  std::string input;
  std::string input2;
  std::string u0;
  std::string u1;
  std::string out = "opkit-out";
  int grid = 0;
  std::uint64_t seed = 42;
  std::vector<std::string> tol_overrides;
  double eta = 1.0;
  double eta1 = 0.0;
  double xi_re = 0.1;
  double xi_im = 0.0;
  int modes = 16;
  int x_samples = 33;
};

// Asserted properties of one command run.
class Checks {
 public:
  void le(const std::string& claim, double measured, double tol) {
    entries_.push_back({claim, measured, tol, "<=", measured <= tol});
  }
  void ge(const std::string& claim, double measured, double tol) {
    entries_.push_back({claim, measured, tol, ">=", measured >= tol});
  }

  Json json() const {
    Json a = Json::array();
    for (const auto& e : entries_) {
      Json j;
      j["claim"] = e.claim;
      j["status"] = e.ok ? "pass" : "fail";
      j["measured"] = io::number(e.measured);
      j["relation"] = e.relation;
      j["tolerance"] = io::number(e.tol);
      a.push_back(j);
    }
    return a;
  }

  int finish(std::ostream& err) const {
    int code = Exit::ok;
    for (const auto& e : entries_) {
      if (e.ok) continue;
      err << "FAIL " << e.claim << ": measured " << io::format_double(e.measured) << ", required "
          << e.relation << " " << io::format_double(e.tol) << "\n";
      code = Exit::numerical_failure;
    }
    return code;
  }

 private:
  struct Entry {
    std::string claim;
    double measured;
    double tol;
    std::string relation;
    bool ok;
  };
  std::vector<Entry> entries_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string path_in(const Options& o, const std::string& name) {
  return (std::filesystem::path(o.out) / name).string();
}

void write_report(const Options& o, const std::string& command, Json body, Json header_extra,
                  std::ostream& out) {
  Json doc;
  doc["format"] = io::kFormat;
  doc["command"] = command;
  Json header;
  header["tool"] = "opkit";
  header["timestamp"] = utc_timestamp();
  for (auto it = header_extra.begin(); it != header_extra.end(); ++it) header[it.key()] = it.value();
  doc["header"] = header;
  doc["body"] = std::move(body);
  const std::string path = path_in(o, "report.json");
  io::write_atomic(path, doc.dump(1) + "\n");
  out << "wrote " << path << "\n";
}

Json opt(const std::optional<double>& x) { return x ? io::number(*x) : Json(nullptr); }

Json spectrum_json(const Matrix& m) { return io::complex_list(dense::to_std(dense::eigenvalues(m))); }

Json accretivity_json(const AccretivityReport& r) {
  Json j;
  j["delta"] = io::number(r.delta);
  j["is_accretive"] = r.is_accretive;
  j["status"] = to_string(r.status);
  j["omega"] = opt(r.omega);
  j["lambda0_modulus"] = opt(r.lambda0_modulus);
  j["bound_rhs"] = opt(r.bound_rhs);
  j["numerical_radius"] = io::number(r.numerical_radius);
  j["operator_norm"] = io::number(r.operator_norm);
  j["spectral_radius"] = io::number(r.spectral_radius);
  j["tolerance"] = io::number(r.tolerance);
  return j;
}

Json certificate_json(const PerturbationCertificate& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  j["range_inclusion_residual"] = io::number(c.range_inclusion_residual);
  j["kernel_inclusion_residual"] = io::number(c.kernel_inclusion_residual);
  j["contraction_TdS"] = io::number(c.contraction_TdS);
  j["contraction_STd"] = io::number(c.contraction_STd);
  j["t_accretive"] = c.t_accretive;
  j["s_accretive"] = c.s_accretive;
  j["theta"] = opt(c.theta);
  j["tolerance"] = io::number(c.tolerance);
  j["rank_tol"] = io::number(c.rank_tol);
  return j;
}

Json vector_values(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(io::complex_to_json(v(i)));
  return a;
}

std::vector<double> grid_from(const Options& o) { return chebyshev_grid(o.grid > 0 ? o.grid : 65); }

// ---------------------------------------------------------------- commands

int cmd_analyze(const Options& o, const ToleranceTable& tol, std::ostream& out, std::ostream& err) {
  const Operator t = io::read_operator(o.input);
  const AccretivityReport rep = accretivity_report(t);
  const CartesianParts parts = cartesian_parts(t);
  const PinvResult p = pseudoinverse(t);
  const int n_angles = o.grid > 0 ? o.grid : 360;
  const bool inclusion = spectral_inclusion_check(t, -1.0, n_angles);

  Checks checks;
  if (rep.lambda0_modulus && rep.bound_rhs)
    checks.le("sector-angle-bound", *rep.lambda0_modulus - *rep.bound_rhs, tol["sector_bound"]);
  checks.ge("spectral-inclusion", inclusion ? 1.0 : 0.0, 1.0);

  Json body;
  body["dim"] = t.dim();
  body["accretivity"] = accretivity_json(rep);
  if (rep.omega) body["omega_degrees"] = io::number(*rep.omega * 180.0 / std::numbers::pi);
  body["re_part_norm"] = io::number(dense::norm2(parts.re_part.matrix()));
  body["im_part_norm"] = io::number(dense::norm2(parts.im_part.matrix()));
  body["spectrum"] = spectrum_json(t.matrix());
  body["spectral_inclusion"] = inclusion;
  body["rank"] = p.rank;
  body["reduced_minimum_modulus"] = io::number(p.gamma);
  body["ep_residual"] = io::number(ep_residual(t, p.pinv));
  body["checks"] = checks.json();

  io::Csv csv({"k", "theta", "re", "im"});
  const auto pts = numerical_range_boundary(t, n_angles);
  for (std::size_t k = 0; k < pts.size(); ++k)
    csv.row(std::vector<double>{static_cast<double>(k), 2.0 * std::numbers::pi * k / pts.size(),
                                pts[k].real(), pts[k].imag()});
  io::write_atomic(path_in(o, "boundary.csv"), csv.str());
  write_report(o, "analyze", body, Json::object(), out);
  return checks.finish(err);
}

int cmd_pinv(const Options& o, const ToleranceTable& tol, std::ostream& out, std::ostream& err) {
  const Operator t = io::read_operator(o.input);
  const PinvResult p = pseudoinverse(t);
  const PenroseResiduals res = penrose_residuals(t, p.pinv);
  const double scale = std::max({1.0, dense::norm2(t.matrix()), dense::norm2(p.pinv.matrix())});
  const AccretivityReport acc = accretivity_report(t);

  Checks checks;
  checks.le("penrose-identities", res.max() / scale, tol["penrose"]);
  Json body;
  body["dim"] = t.dim();
  body["rank"] = p.rank;
  body["rank_tol"] = io::number(p.rank_tol);
  body["reduced_minimum_modulus"] = io::number(p.gamma);
  Json sv = Json::array();
  for (Eigen::Index i = 0; i < p.singular_values.size(); ++i) sv.push_back(p.singular_values(i));
  body["singular_values"] = sv;
  body["penrose"] = {{"tpt", res.tpt}, {"ptp", res.ptp}, {"tp_herm", res.tp_herm}, {"pt_herm", res.pt_herm}};
  body["ep_residual"] = io::number(ep_residual(t, p.pinv));
  body["is_accretive"] = acc.is_accretive;
  if (acc.is_accretive) {
    checks.le("ep-accretive", ep_residual(t, p.pinv), tol["ep"]);
    const double lmin = dense::hermitian_min_eigenvalue(dense::hermitian_part(p.pinv.matrix()));
    checks.le("pinv-accretive", -lmin, tol["pinv_accretive"]);
    body["pinv_re_min_eigenvalue"] = io::number(lmin);
    const UnitaryOnRangeReport u = unitary_on_range_check(t);
    body["unitary_on_range"] = {{"status", to_string(u.status)},
                                {"w_t", io::number(u.w_t)},
                                {"w_pinv", io::number(u.w_pinv)},
                                {"unitarity_residual", io::number(u.unitarity_residual)}};
  }
  body["checks"] = checks.json();
  io::write_operator(path_in(o, "pinv.json"), p.pinv);
  write_report(o, "pinv", body, Json::object(), out);
  return checks.finish(err);
}

int cmd_perturb(const Options& o, const ToleranceTable& tol, std::ostream& out, std::ostream& err) {
  const Operator t = io::read_operator(o.input);
  const Operator s = io::read_operator(o.input2);
  require_same_dim(t, s, "perturb");
  const PerturbationCertificate cert = perturbation_certificate(t, s);
  if (cert.mode == CertificateMode::fail || !cert.t_accretive || !cert.s_accretive) {
    Json body;
    body["certificate"] = certificate_json(cert);
    write_report(o, "perturb", body, Json::object(), out);
    err << "hypotheses not met; certificate:\n" << certificate_json(cert).dump(1) << "\n";
    return Exit::hypothesis_failure;
  }
  const PerturbationAudit a = audit_perturbation(t, s);
  const bool range = cert.mode != CertificateMode::kernel_side;
  Checks checks;
  checks.le(range ? "perturbation-range-side-formula" : "perturbation-kernel-side-formula",
            a.formula_gap / std::max(1.0, a.pinv_norm), tol["perturb_formula"]);
  checks.le("perturbation-rank-range-kernel",
            a.rank_sum == a.rank_t ? std::max(a.range_distance, a.kernel_distance)
                                   : std::numeric_limits<double>::infinity(),
            tol["perturb_subspace"]);
  checks.le("perturbation-error-bound", a.error_norm - a.error_bound, 1e-12 * std::max(1.0, a.error_bound));

  Json body;
  body["certificate"] = certificate_json(cert);
  body["side"] = range ? "range" : "kernel";
  body["formula_gap"] = io::number(a.formula_gap);
  body["pinv_norm"] = io::number(a.pinv_norm);
  body["rank_t"] = a.rank_t;
  body["rank_sum"] = a.rank_sum;
  body["range_distance"] = io::number(a.range_distance);
  body["kernel_distance"] = io::number(a.kernel_distance);
  body["error_norm"] = io::number(a.error_norm);
  body["error_bound"] = io::number(a.error_bound);
  body["sum_pinv_norm"] = io::number(a.sum_pinv_norm);
  body["theta_bound"] = opt(a.theta_bound);
  // Reported, not asserted: the bound is not scale invariant.
  if (a.theta_bound) body["theta_bound_holds"] = a.sum_pinv_norm <= *a.theta_bound;
  body["literal_norm_condition"] = a.literal_norm_condition;
  body["sufficient_norm_condition"] = a.sufficient_norm_condition;
  body["checks"] = checks.json();
  io::write_operator(path_in(o, "pinv_sum.json"), a.formula);
  write_report(o, "perturb", body, Json::object(), out);
  return checks.finish(err);
}

int cmd_factorize(const Options& o, const ToleranceTable& tol, std::ostream& out, std::ostream& err) {
  const Operator t = io::read_operator(o.input);
  const Operator s = io::read_operator(o.input2);
  const QuadraticPencil p(t, s);
  const PencilFactorization f = factorize(p);
  std::vector<Complex> lambdas;
  for (int k = 0; k < 16; ++k) lambdas.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 16.0));
  const FactorizationResiduals res = factorization_residuals(f, p, lambdas);
  const VandermondeReport v = vandermonde_check(f);
  const RelativeBoundReport rb = relative_bound_check(p, 200, o.seed);
  const std::vector<Complex> pencil = pencil_spectrum(p);

  Checks checks;
  checks.le("factorization-symmetric", res.symmetric, tol["factor_symmetric"]);
  checks.le("factorization-root-identity", root_identity_residual(f, p), 1e-10);
  checks.le("sqrt-residual", f.sqrt_residual, 1e-10 * std::max(1.0, dense::norm2(f.upsilon.matrix())));
  if (f.upsilon_accretive && f.sqrt_sector_angle)
    checks.le("sqrt-sector", *f.sqrt_sector_angle, std::numbers::pi / 4.0 + 1e-8);
  if (f.commuting) {
    checks.le("factorization-one-sided", res.one_sided, tol["factor_one_sided"]);
    const dense::SpectrumMatch m = spectrum_agreement(f, p);
    const double zs = std::max({1.0, dense::norm2(f.z1.matrix()), dense::norm2(f.z2.matrix())});
    checks.le("factorization-spectrum", m.max_distance / zs, tol["factor_spectrum"]);
  }
  checks.ge("vandermonde-agreement", v.agree ? 1.0 : 0.0, 1.0);
  if (f.strong_regime) checks.ge("spectrum-separation", f.separated ? 1.0 : 0.0, 1.0);
  if (f.t_accretive && f.t2_accretive && f.s_accretive)
    checks.le("relative-bound", rb.feasible ? static_cast<double>(rb.violations)
                                            : std::numeric_limits<double>::infinity(), 0.0);

  Json body;
  body["dim"] = t.dim();
  body["hypotheses"] = {{"t_accretive", f.t_accretive},
                        {"t2_accretive", f.t2_accretive},
                        {"s_accretive", f.s_accretive},
                        {"upsilon_accretive", f.upsilon_accretive}};
  body["warnings"] = f.warnings;
  body["regime"] = f.strong_regime ? "strong (Upsilon strictly accretive)" : "weak (separation not asserted)";
  body["upsilon_delta"] = io::number(f.upsilon_delta);
  body["sqrt_residual"] = io::number(f.sqrt_residual);
  body["sqrt_sector_angle"] = opt(f.sqrt_sector_angle);
  body["z1_sector_angle"] = opt(f.z1_sector_angle);
  body["commutator_norm"] = io::number(f.commutator_norm);
  body["commuting"] = f.commuting;
  body["separation"] = io::number(f.separation);
  body["separated"] = f.separated;
  body["residuals"] = {{"symmetric", io::number(res.symmetric)},
                       {"one_sided", io::number(res.one_sided)},
                       {"scale", io::number(res.scale)}};
  body["spectra_z1"] = io::complex_list(f.spectra_z1);
  body["spectra_z2"] = io::complex_list(f.spectra_z2);
  body["pencil_spectrum"] = io::complex_list(pencil);
  body["vandermonde"] = {{"vandermonde_sigma_min", io::number(v.vandermonde_sigma_min)},
                         {"sqrt_sigma_min", io::number(v.sqrt_sigma_min)},
                         {"agree", v.agree}};
  body["relative_bound"] = {{"feasible", rb.feasible},
                            {"nu1", io::number(rb.nu1)},
                            {"nu2", io::number(rb.nu2)},
                            {"rho1", io::number(rb.rho1)},
                            {"rho2", io::number(rb.rho2)},
                            {"samples", rb.samples},
                            {"violations", rb.violations}};
  body["checks"] = checks.json();

  io::Csv csv({"set", "index", "re", "im"});
  const auto put = [&](const char* name, const std::vector<Complex>& zs) {
    for (std::size_t k = 0; k < zs.size(); ++k)
      csv.row(std::vector<std::string>{name, std::to_string(k), io::format_double(zs[k].real()),
                                       io::format_double(zs[k].imag())});
  };
  put("z1", f.spectra_z1);
  put("z2", f.spectra_z2);
  put("pencil", pencil);
  io::write_atomic(path_in(o, "spectra.csv"), csv.str());
  io::write_operator(path_in(o, "upsilon.json"), f.upsilon);
  io::write_operator(path_in(o, "sqrt_upsilon.json"), f.sqrt_upsilon);
  io::write_operator(path_in(o, "z1.json"), f.z1);
  io::write_operator(path_in(o, "z2.json"), f.z2);
  write_report(o, "factorize", body, Json::object(), out);
  return checks.finish(err);
}

void write_solution_csv(const Options& o, const BvpSolution& sol) {
  const Eigen::Index n = sol.values.empty() ? 0 : sol.values.front().size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 1; i <= n; ++i) {
    header.push_back("re_" + std::to_string(i));
    header.push_back("im_" + std::to_string(i));
  }
  io::Csv csv(header);
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    std::vector<double> row{sol.grid[k]};
    for (Eigen::Index i = 0; i < n; ++i) {
      row.push_back(sol.values[k](i).real());
      row.push_back(sol.values[k](i).imag());
    }
    csv.row(row);
  }
  io::write_atomic(path_in(o, "solution.csv"), csv.str());
}

int cmd_solve_bvp(const Options& o, const ToleranceTable& tol, std::ostream& out, std::ostream& err) {
  const Operator t = io::read_operator(o.input);
  const Operator s = io::read_operator(o.input2);
  const Vector u0 = io::read_vector(o.u0);
  const Vector u1 = io::read_vector(o.u1);
  const BvpProblem p = make_bvp_problem(t, s, u0, u1);
  const BvpSolution sol = solve_bvp(p, grid_from(o));

  Checks checks;
  checks.le("bvp-boundary", sol.boundary_residual / (1.0 + u0.norm() + u1.norm()), tol["bvp_boundary"]);
  checks.le("bvp-ode-residual", sol.ode_residual, tol["bvp_ode"]);
  checks.le("bvp-derivative-fd", sol.derivative_gap, 1e-6);

  Json body;
  body["dim"] = t.dim();
  body["grid_points"] = sol.grid.size();
  body["commutation_residual"] = io::number(p.commutation_residual);
  body["commutation_tol"] = io::number(p.commutation_tol);
  body["resonance_margin"] = io::number(sol.resonance_margin);
  body["x0"] = vector_values(sol.x0);
  body["x1"] = vector_values(sol.x1);
  body["boundary_residual"] = io::number(sol.boundary_residual);
  body["boundary_tol"] = io::number(sol.boundary_tol);
  body["block_gap"] = io::number(sol.block_gap);
  body["ode_residual"] = io::number(sol.ode_residual);
  body["derivative_gap"] = io::number(sol.derivative_gap);
  body["separation"] = io::number(p.factorization.separation);
  body["warnings"] = p.factorization.warnings;
  body["checks"] = checks.json();
  write_solution_csv(o, sol);
  write_report(o, "solve-bvp", body, Json::object(), out);
  return checks.finish(err);
}

int cmd_demo(const Options& o, const ToleranceTable& tol, std::ostream& out, std::ostream& err) {
  LaplacianModel m;
  m.eta = o.eta;
  m.eta1 = o.eta1;
  m.xi = Complex(o.xi_re, o.xi_im);
  m.n_modes = o.modes;
  if (m.n_modes < 1) throw ParameterError("--modes must be positive");
  auto [u0, u1] = default_boundary_data(m.n_modes);
  if (!o.u0.empty()) u0 = io::read_vector(o.u0);
  if (!o.u1.empty()) u1 = io::read_vector(o.u1);
  const DemoResult d = demo(m, u0, u1, grid_from(o), o.x_samples);

  Checks checks;
  checks.le("laplacian-oracle", d.oracle_gap, tol["laplacian_oracle"]);
  checks.le("laplacian-boundary", d.solution.boundary_residual / (1.0 + u0.norm() + u1.norm()),
            tol["laplacian_boundary"]);
  checks.ge("laplacian-certificate", d.certificate.mode == CertificateMode::fail ? 0.0 : 1.0, 1.0);

  Json body;
  body["model"] = {{"eta", m.eta},
                   {"eta1", m.eta1},
                   {"xi", io::complex_to_json(m.xi)},
                   {"n_modes", m.n_modes}};
  body["condition"] = {{"holds", d.condition.holds},
                       {"sum", io::number(d.condition.sum)},
                       {"bound", io::number(d.condition.bound)},
                       {"terms", d.condition.terms}};
  body["certificate_T2_S"] = certificate_json(d.certificate);
  body["commutation_residual"] = io::number(d.commutation_residual);
  body["separation"] = io::number(d.separation);
  body["boundary_residual"] = io::number(d.solution.boundary_residual);
  body["ode_residual"] = io::number(d.solution.ode_residual);
  body["oracle_gap"] = io::number(d.oracle_gap);
  body["checks"] = checks.json();

  io::Csv csv({"t", "x", "re_u", "im_u"});
  for (const FieldSample& f : d.field) csv.row(std::vector<double>{f.t, f.x, f.u.real(), f.u.imag()});
  io::write_atomic(path_in(o, "field.csv"), csv.str());
  write_report(o, "demo-laplacian", body, Json::object(), out);
  return checks.finish(err);
}

int cmd_selftest(const Options& o, const ToleranceTable& tol, std::ostream& out, std::ostream& err) {
  ConformanceOptions co;
  co.seed = o.seed;
  co.tolerances = tol;
  const ConformanceReport r = run_conformance(co);
  for (const ClaimResult& c : r.claims)
    out << (c.status == "pass" ? "PASS " : c.status == "skip" ? "SKIP " : "FAIL ") << "[" << c.criterion
        << "] " << c.id << "  measured " << io::format_double(c.measured) << " " << c.relation << " "
        << io::format_double(c.tolerance) << "\n";
  Json header;
  header["seed"] = o.seed;
  header["timings_s"] = conformance_timings(r);
  write_report(o, "selftest", conformance_body(r), header, out);
  int code = Exit::ok;
  for (const ClaimResult& c : r.claims) {
    if (c.status != "fail") continue;
    err << "FAIL " << c.id << ": " << c.detail << "\n";
    code = Exit::numerical_failure;
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"opkit: accretive operators, Moore-Penrose perturbation, quadratic pencils"};
  app.footer(kFooter);
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Seed for every sampled check")->capture_default_str();
  app.add_option("--tol-override", o.tol_overrides, "Override one tolerance, key=value (repeatable)")
      ->take_all();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();

  const auto input = [&](CLI::App* c, bool second) {
    c->add_option("--input", o.input, "Matrix T (JSON)")->required();
    if (second) c->add_option("--input2", o.input2, "Matrix S (JSON)")->required();
  };
  CLI::App* analyze = app.add_subcommand("analyze", "Accretivity, sector angle, numerical range");
  input(analyze, false);
  analyze->add_option("--grid", o.grid, "Number of boundary angles (default 360)");
  CLI::App* pinv = app.add_subcommand("pinv", "Moore-Penrose inverse and Penrose residuals");
  input(pinv, false);
  CLI::App* perturb = app.add_subcommand("perturb", "Certified perturbation of the pseudoinverse");
  input(perturb, true);
  CLI::App* factor = app.add_subcommand("factorize", "Factor roots of lambda^2 - 2 lambda T - S");
  input(factor, true);
  CLI::App* bvp = app.add_subcommand("solve-bvp", "u'' - 2Tu' - Su = 0, u(0) = u0, u(1) = u1");
  input(bvp, true);
  bvp->add_option("--u0", o.u0, "Vector u(0) (JSON)")->required();
  bvp->add_option("--u1", o.u1, "Vector u(1) (JSON)")->required();
  bvp->add_option("--grid", o.grid, "Chebyshev grid points (default 65)");
  CLI::App* demo_cmd = app.add_subcommand("demo-laplacian", "Truncated Dirichlet-Laplacian demo");
  demo_cmd->add_option("--eta", o.eta, "eta >= 0")->capture_default_str();
  demo_cmd->add_option("--eta1", o.eta1, "eta1")->capture_default_str();
  demo_cmd->add_option("--xi-re", o.xi_re, "Re(xi) >= 0")->capture_default_str();
  demo_cmd->add_option("--xi-im", o.xi_im, "Im(xi)")->capture_default_str();
  demo_cmd->add_option("--modes", o.modes, "Retained modes")->capture_default_str();
  demo_cmd->add_option("--grid", o.grid, "Chebyshev grid points in t (default 65)");
  demo_cmd->add_option("--x-samples", o.x_samples, "Samples in x")->capture_default_str();
  demo_cmd->add_option("--u0", o.u0, "Modal coefficients of u(0) (JSON vector)");
  demo_cmd->add_option("--u1", o.u1, "Modal coefficients of u(1) (JSON vector)");
  CLI::App* selftest = app.add_subcommand("selftest", "Run every property suite");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return Exit::parse_failure;
  }

  try {
    ToleranceTable tol;
    for (const auto& a : o.tol_overrides) tol.apply_override(a);
    if (o.grid < 0) throw ParameterError("--grid must be positive");
    if (*analyze) return cmd_analyze(o, tol, out, err);
    if (*pinv) return cmd_pinv(o, tol, out, err);
    if (*perturb) return cmd_perturb(o, tol, out, err);
    if (*factor) return cmd_factorize(o, tol, out, err);
    if (*bvp) return cmd_solve_bvp(o, tol, out, err);
    if (*demo_cmd) return cmd_demo(o, tol, out, err);
    if (*selftest) return cmd_selftest(o, tol, out, err);
  } catch (const ParseError& e) {
    err << "parse error at " << e.what() << "\n";
    return Exit::parse_failure;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << "\n";
    return Exit::parse_failure;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return Exit::parse_failure;
  } catch (const ResonanceError& e) {
    err << "resonance: " << e.what() << "\n";
    return Exit::hypothesis_failure;
  } catch (const HypothesisError& e) {
    err << "hypothesis failure: " << e.what() << "\n";
    return Exit::hypothesis_failure;
  } catch (const ModelError& e) {
    err << "model refused: " << e.what() << "\n";
    return Exit::hypothesis_failure;
  } catch (const PreconditionError& e) {
    err << "precondition failure: " << e.what() << "\n";
    return Exit::hypothesis_failure;
  } catch (const NoPrincipalRootError& e) {
    err << "no principal root: " << e.what() << "\n";
    return Exit::hypothesis_failure;
  } catch (const AccuracyError& e) {
    err << "accuracy failure (achieved " << io::format_double(e.achieved()) << "): " << e.what() << "\n";
    return Exit::numerical_failure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return Exit::numerical_failure;
  }
  return Exit::parse_failure;
}

}  // namespace opkit::cli
