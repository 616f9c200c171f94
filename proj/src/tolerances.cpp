#include "opkit/tolerances.hpp"

#include <charconv>
#include <cmath>

#include "opkit/errors.hpp"

namespace opkit {

ToleranceTable::ToleranceTable()
    : values_{
          {"penrose", 1e-10},
          {"ep", 1e-10},
          {"pinv_accretive", 1e-10},
          {"sector_bound", 1e-8},
          {"sector_witness", 1e-10},
          {"perturb_formula", 1e-8},
          {"perturb_subspace", 1e-8},
          {"perturb_scaling", 1e-12},
          {"second_power_gamma", 1e-12},
          {"square_pinv", 1e-10},
          {"fractional_power", 1e-6},
          {"fractional_sector", 1e-6},
          {"factor_symmetric", 1e-10},
          {"factor_one_sided", 1e-10},
          {"factor_spectrum", 1e-6},
          {"separation_delta", 1e-6},
          {"bvp_scalar", 1e-10},
          {"bvp_boundary", 1e-9},
          {"bvp_ode", 1e-8},
          {"bvp_fd_gap", 1e-4},
          {"bvp_fd_ratio_lo", 3.5},
          {"bvp_fd_ratio_hi", 4.5},
          {"bvp_superposition", 1e-10},
          {"laplacian_oracle", 1e-8},
          {"laplacian_boundary", 1e-9},
      } {}

double ToleranceTable::operator[](const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ParameterError("unknown tolerance key: " + key);
  return it->second;
}

void ToleranceTable::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ParseError("--tol-override", "expected key=value, got \"" + assignment + "\"");
  const std::string key = assignment.substr(0, eq);
  const std::string val = assignment.substr(eq + 1);
  const auto it = values_.find(key);
  if (it == values_.end()) throw ParseError("--tol-override", "unknown tolerance key \"" + key + "\"");
  double x = 0.0;
  const auto res = std::from_chars(val.data(), val.data() + val.size(), x);
  if (res.ec != std::errc() || res.ptr != val.data() + val.size() || !std::isfinite(x) || !(x > 0.0))
    throw ParseError("--tol-override", "value for \"" + key + "\" must be a positive number");
  it->second = x;
}

}  // namespace opkit
