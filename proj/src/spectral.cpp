#include "opkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "opkit/dense.hpp"

namespace opkit {

namespace {

template <class E>
void rethrow_as(const Error& e, const std::string& stage) {
  if (dynamic_cast<const E*>(&e)) throw E(stage + ": " + e.what());
}

[[noreturn]] void rethrow_staged(const Error& e, const std::string& stage) {
  if (const auto* a = dynamic_cast<const AccuracyError*>(&e))
    throw AccuracyError(stage + ": " + a->what(), a->achieved());
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) throw ParseError(p->location(), stage + ": " + p->what());
  rethrow_as<ModelError>(e, stage);
  rethrow_as<PreconditionError>(e, stage);
  rethrow_as<HypothesisError>(e, stage);
  rethrow_as<ResonanceError>(e, stage);
  rethrow_as<NoPrincipalRootError>(e, stage);
  rethrow_as<ParameterError>(e, stage);
  rethrow_as<DimensionError>(e, stage);
  throw Error(stage + ": " + e.what());
}

template <class F>
auto staged(const char* stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    rethrow_staged(e, stage);
  }
}

}  // namespace

std::vector<double> LaplacianModel::eigenvalues() const {
  std::vector<double> lam(std::max(n_modes, 0));
  for (int j = 1; j <= n_modes; ++j) lam[j - 1] = std::pow(j * std::numbers::pi, 2);
  return lam;
}

std::vector<Complex> LaplacianModel::t_diagonal() const {
  std::vector<Complex> t;
  for (const double lam : eigenvalues()) t.push_back(Complex(eta, eta1 * lam) * lam);
  return t;
}

std::vector<std::string> feasibility_violations(const LaplacianModel& m) {
  std::vector<std::string> out;
  if (m.n_modes < 1) out.emplace_back("n_modes must be positive");
  if (!std::isfinite(m.eta) || !std::isfinite(m.eta1) || !std::isfinite(m.xi.real()) ||
      !std::isfinite(m.xi.imag()))
    out.emplace_back("parameters must be finite");
  if (m.eta < 0.0) out.emplace_back("eta must be non-negative");
  if (m.xi.real() < 0.0) out.emplace_back("Re(xi) must be non-negative");
  const auto t = m.t_diagonal();
  for (std::size_t j = 0; j < t.size(); ++j) {
    if ((t[j] * t[j]).real() < 0.0) {
      out.push_back("Re(t_j^2) < 0 from mode j = " + std::to_string(j + 1) +
                    " (T^2 not accretive; needs eta >= |eta1| lambda_N)");
      break;
    }
  }
  return out;
}

std::pair<Operator, Operator> build_operators(const LaplacianModel& m) {
  const auto bad = feasibility_violations(m);
  if (!bad.empty()) {
    std::string msg = "infeasible Laplacian model:";
    for (const auto& b : bad) msg += " [" + b + "]";
    throw ModelError(msg);
  }
  const auto t = m.t_diagonal();
  Vector d(m.n_modes);
  for (int j = 0; j < m.n_modes; ++j) d(j) = t[j];
  return {Operator::diagonal(d), Operator(Matrix(m.xi * Matrix::Identity(m.n_modes, m.n_modes)))};
}

ConditionCheck condition_check(const LaplacianModel& m) {
  if (m.eta == 0.0 && m.eta1 == 0.0) throw PreconditionError("condition: eta and eta1 both vanish");
  if (m.xi == Complex(0.0)) throw PreconditionError("condition: xi vanishes");
  ConditionCheck c;
  c.terms = std::max(m.n_modes, 10000);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double partial = 0.0;
  // Summed from the smallest terms up.
  for (int j = c.terms; j >= 1; --j) {
    const double lam = pi2 * j * j;
    const double mod2 = m.eta * m.eta + m.eta1 * m.eta1 * lam * lam;
    partial += 1.0 / (mod2 * lam * lam);
  }
  const double jj = c.terms;
  double tail = std::numeric_limits<double>::infinity();
  if (m.eta != 0.0) tail = 1.0 / (3.0 * m.eta * m.eta * pi2 * pi2 * jj * jj * jj);
  if (m.eta1 != 0.0)
    tail = std::min(tail, 1.0 / (7.0 * m.eta1 * m.eta1 * std::pow(pi2, 4) * std::pow(jj, 7)));
  c.sum = partial + tail;
  c.bound = 1.0 / std::abs(m.xi);
  c.holds = c.sum < c.bound;
  return c;
}

BvpSolution per_mode_oracle(const LaplacianModel& m, const Vector& u0, const Vector& u1,
                            const std::vector<double>& grid) {
  const auto t = m.t_diagonal();
  const auto n = static_cast<Eigen::Index>(t.size());
  if (u0.size() != n || u1.size() != n)
    throw DimensionError("per-mode oracle: boundary data do not match the mode count");
  BvpSolution sol;
  sol.x0 = Vector::Zero(n);
  sol.x1 = Vector::Zero(n);
  std::vector<Complex> z1(n), z2(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex r = std::sqrt(t[j] * t[j] + m.xi);
    z1[j] = t[j] + r;
    z2[j] = t[j] - r;
    const Complex e1 = std::exp(-z1[j]);
    const Complex e2 = std::exp(z2[j]);
    const Complex det = e1 * e2 - 1.0;
    if (std::abs(det) <= 1e-12)
      throw ResonanceError("per-mode oracle: mode " + std::to_string(j + 1) + " is resonant");
    sol.x0(j) = (u0(j) * e2 - u1(j)) / det;
    sol.x1(j) = (e1 * u1(j) - u0(j)) / det;
  }
  sol.grid = grid;
  for (const double s : grid) {
    Vector v(n);
    for (Eigen::Index j = 0; j < n; ++j)
      v(j) = sol.x0(j) * std::exp(-(1.0 - s) * z1[j]) + sol.x1(j) * std::exp(s * z2[j]);
    sol.values.push_back(v);
  }
  double bres = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    bres = std::max(bres, std::abs(sol.x0(j) * std::exp(-z1[j]) + sol.x1(j) - u0(j)));
    bres = std::max(bres, std::abs(sol.x0(j) + sol.x1(j) * std::exp(z2[j]) - u1(j)));
  }
  sol.boundary_residual = bres;
  sol.boundary_tol = 1e-9 * (1.0 + u0.norm() + u1.norm());
  return sol;
}

std::pair<Vector, Vector> default_boundary_data(int n_modes) {
  Vector u0(n_modes), u1(n_modes);
  for (int j = 1; j <= n_modes; ++j) {
    u0(j - 1) = 1.0 / (j * j);
    u1(j - 1) = (j % 2 == 0 ? 0.5 : -0.5) / (j * j);
  }
  return {u0, u1};
}

DemoResult demo(const LaplacianModel& m, const Vector& u0, const Vector& u1,
                const std::vector<double>& grid, int x_samples) {
  if (x_samples < 2) throw ParameterError("demo: at least two x samples are required");
  DemoResult r;
  r.model = m;
  const auto [t, s] = staged("build", [&] { return build_operators(m); });
  r.condition = staged("condition", [&] { return condition_check(m); });
  if (!r.condition.holds)
    throw HypothesisError("condition: summability condition fails (sum " +
                          std::to_string(r.condition.sum) + " >= " +
                          std::to_string(r.condition.bound) + ")");
  r.certificate = staged("certificate", [&] { return perturbation_certificate(t * t, s); });
  const BvpProblem p = staged("factorize", [&] { return make_bvp_problem(t, s, u0, u1); });
  r.commutation_residual = p.commutation_residual;
  r.separation = p.factorization.separation;
  r.solution = staged("solve", [&] { return solve_bvp(p, grid); });
  r.oracle = staged("oracle", [&] { return per_mode_oracle(m, u0, u1, grid); });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = (r.solution.values[i] - r.oracle.values[i]).norm() /
                     std::max(1.0, r.oracle.values[i].norm());
    r.oracle_gap = std::max(r.oracle_gap, d);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int k = 0; k < x_samples; ++k) {
      const double x = static_cast<double>(k) / (x_samples - 1);
      Complex u = 0.0;
      for (int j = 1; j <= m.n_modes; ++j)
        u += r.solution.values[i](j - 1) * std::numbers::sqrt2 * std::sin(j * std::numbers::pi * x);
      r.field.push_back({grid[i], x, u});
    }
  }
  return r;
}

}  // namespace opkit
