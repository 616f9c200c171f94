#pragma once

#include <map>
#include <string>

namespace opkit {

/// Every acceptance threshold, by key. Defaults mirror the documented
/// tolerances; `--tol-override key=value` edits one entry.
class ToleranceTable {
 public:
  ToleranceTable();

  double operator[](const std::string& key) const;
  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  /// Parses "key=value". Unknown keys and non-positive or non-numeric values
  /// throw ParseError.
  void apply_override(const std::string& assignment);

  const std::map<std::string, double>& values() const noexcept { return values_; }

 private:
  std::map<std::string, double> values_;
};

}  // namespace opkit
