#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opkit/io.hpp"
#include "opkit/tolerances.hpp"

namespace opkit {

struct ClaimResult {
  std::string id;
  int criterion = 0;
  std::string status;  ///< "pass", "fail" or "skip"
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation;  ///< how measured is compared with tolerance
  std::string detail;
  double runtime_s = 0.0;
};

struct ConformanceReport {
  std::uint64_t seed = 0;
  std::vector<ClaimResult> claims;

  bool all_passed() const;
  const ClaimResult* find(const std::string& id) const;
};

struct ConformanceOptions {
  std::uint64_t seed = 42;
  ToleranceTable tolerances;
  /// Re-run a subset of the suites and compare the serialized bodies.
  bool determinism_check = true;
};

/// Runs every property suite. The claim list is fixed; a suite that throws
/// marks its claims as failed with the error text as detail.
ConformanceReport run_conformance(const ConformanceOptions& opts = {});

/// Runs only the suites of the given criterion numbers (1..8).
ConformanceReport run_conformance_subset(const ConformanceOptions& opts,
                                         const std::vector<int>& criteria);

/// Deterministic part of the report (no runtimes).
io::Json conformance_body(const ConformanceReport& r);

/// Runtimes per claim and the total; kept apart from the body.
io::Json conformance_timings(const ConformanceReport& r);

}  // namespace opkit
