#include "opkit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace opkit::io {

namespace {

Json entries_of(const Complex* data, Eigen::Index count) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < count; ++i) arr.push_back(Json::array({data[i].real(), data[i].imag()}));
  return arr;
}

Complex parse_entry(const Json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  if (e.is_null()) throw ParseError(where, "entry is null (NaN or infinity are not allowed)");
  throw ParseError(where, "entry must be a number or a [re, im] pair");
}

// Validates the envelope and returns (dim, entries).
std::pair<Eigen::Index, const Json*> envelope(const Json& j, const std::string& where,
                                             const char* kind) {
  if (!j.is_object()) throw ParseError(where, "document must be a JSON object");
  if (!j.contains("format") || !j["format"].is_number_integer())
    throw ParseError(where + ":format", "missing integer \"format\" field");
  if (j["format"].get<int>() != kFormat)
    throw ParseError(where + ":format", "unsupported format version " + j["format"].dump());
  if (j.contains("kind") && (!j["kind"].is_string() || j["kind"].get<std::string>() != kind))
    throw ParseError(where + ":kind", std::string("expected kind \"") + kind + "\"");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
    throw ParseError(where + ":dim", "missing or non-positive integer \"dim\"");
  if (!j.contains("entries") || !j["entries"].is_array())
    throw ParseError(where + ":entries", "missing \"entries\" array");
  return {static_cast<Eigen::Index>(j["dim"].get<long long>()), &j["entries"]};
}

Complex checked(const Json& e, const std::string& where) {
  const Complex z = parse_entry(e, where);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ParseError(where, "non-finite entry");
  return z;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  // Row-major copy.
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = m;
  Json j;
  j["format"] = kFormat;
  j["kind"] = "matrix";
  j["dim"] = m.rows();
  j["entries"] = entries_of(r.data(), r.size());
  return j;
}

Json vector_to_json(const Vector& v) {
  Json j;
  j["format"] = kFormat;
  j["kind"] = "vector";
  j["dim"] = v.size();
  j["entries"] = entries_of(v.data(), v.size());
  return j;
}

Operator operator_from_json(const Json& j, const std::string& where) {
  const auto [n, entries] = envelope(j, where, "matrix");
  if (static_cast<Eigen::Index>(entries->size()) != n * n)
    throw ParseError(where + ":entries", "expected " + std::to_string(n * n) + " entries for a " +
                                             std::to_string(n) + "x" + std::to_string(n) +
                                             " matrix, found " + std::to_string(entries->size()) +
                                             " (non-square input?)");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto k = static_cast<std::size_t>(r * n + c);
      m(r, c) = checked((*entries)[k], where + ":entries[" + std::to_string(k) + "]");
    }
  return Operator(std::move(m));
}

Vector vector_from_json(const Json& j, const std::string& where) {
  const auto [n, entries] = envelope(j, where, "vector");
  if (static_cast<Eigen::Index>(entries->size()) != n)
    throw ParseError(where + ":entries", "expected " + std::to_string(n) + " entries, found " +
                                             std::to_string(entries->size()));
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k)
    v(k) = checked((*entries)[static_cast<std::size_t>(k)],
                   where + ":entries[" + std::to_string(k) + "]");
  return v;
}

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ":byte " + std::to_string(e.byte), e.what());
  }
}

Operator read_operator(const std::string& path) { return operator_from_json(read_json(path), path); }

Vector read_vector(const std::string& path) { return vector_from_json(read_json(path), path); }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
}

void write_operator(const std::string& path, const Operator& t) {
  write_atomic(path, matrix_to_json(t.matrix()).dump(1) + "\n");
}

void write_vector(const std::string& path, const Vector& v) {
  write_atomic(path, vector_to_json(v).dump(1) + "\n");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }

void Csv::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw Error("csv: row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ',';
    text_ += fields[i];
  }
  text_ += '\n';
}

void Csv::row(const std::vector<double>& fields) {
  std::vector<std::string> s;
  s.reserve(fields.size());
  for (const double x : fields) s.push_back(format_double(x));
  row(s);
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json complex_to_json(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

Json complex_list(const std::vector<Complex>& zs) {
  Json a = Json::array();
  for (const Complex z : zs) a.push_back(complex_to_json(z));
  return a;
}

}  // namespace opkit::io
