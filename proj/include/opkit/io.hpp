#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "opkit/operator.hpp"

namespace opkit::io {

using Json = nlohmann::ordered_json;

/// Current version of the on-disk format.
inline constexpr int kFormat = 1;

// Matrices:  {"format": 1, "kind": "matrix", "dim": n, "entries": [[re, im], ...]}
// Vectors:   {"format": 1, "kind": "vector", "dim": n, "entries": [[re, im], ...]}
// Entries are row-major; a bare number is accepted for a real entry.

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

/// `where` prefixes the location reported by ParseError.
Operator operator_from_json(const Json& j, const std::string& where);
Vector vector_from_json(const Json& j, const std::string& where);

Operator read_operator(const std::string& path);
Vector read_vector(const std::string& path);

/// Parses a whole file as JSON; ParseError carries "path:byte N".
Json read_json(const std::string& path);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

void write_operator(const std::string& path, const Operator& t);
void write_vector(const std::string& path, const Vector& v);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

/// Simple CSV builder; every field is already formatted.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& fields);
  std::string str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

/// JSON with NaN and infinities mapped to null.
Json number(double x);
Json complex_to_json(Complex z);
Json complex_list(const std::vector<Complex>& zs);

}  // namespace opkit::io
