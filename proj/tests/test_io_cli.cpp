#include "doctest.h"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <unistd.h>

#include "opkit/cli.hpp"
#include "opkit/io.hpp"
#include "opkit/random.hpp"
#include "opkit/tolerances.hpp"

using namespace opkit;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per call, removed by the destructor.
struct Scratch {
  fs::path dir;
  Scratch() {
    static std::atomic<int> counter{0};
    dir = fs::temp_directory_path() /
          ("opkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string file(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "opkit");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

io::Json report(const std::string& dir) { return io::read_json(dir + "/report.json"); }

}  // namespace

TEST_CASE("matrix documents round-trip bit for bit") {
  Scratch s;
  Rng rng(1);
  const Operator t(sample::gaussian(rng, 5, 5) * 1e-3);
  io::write_operator(s.path("t.json"), t);
  const Operator back = io::read_operator(s.path("t.json"));
  CHECK(back.matrix() == t.matrix());

  Vector v(3);
  v << Complex(1.0 / 3.0, -2.0), Complex(1e-300, 0.0), Complex(-0.0, 5e300);
  io::write_vector(s.path("v.json"), v);
  CHECK(io::read_vector(s.path("v.json")) == v);
}

TEST_CASE("malformed documents are rejected with a location") {
  Scratch s;
  CHECK(io::read_operator(s.file("real.json", R"({"format":1,"kind":"matrix","dim":2,"entries":[1,0,0,2]})"))
            .matrix() == (Matrix(2, 2) << 1, 0, 0, 2).finished());

  const auto expect_parse = [&](const std::string& name, const std::string& text, const std::string& where) {
    bool thrown = false;
    try {
      io::read_operator(s.file(name, text));
    } catch (const ParseError& e) {
      thrown = true;
      CHECK(e.location().find(where) != std::string::npos);
    }
    CHECK(thrown);
  };
  expect_parse("nonsquare.json", R"({"format":1,"kind":"matrix","dim":2,"entries":[1,0,0]})", "entries");
  expect_parse("null.json", R"({"format":1,"kind":"matrix","dim":1,"entries":[null]})", "entries[0]");
  expect_parse("pair.json", R"({"format":1,"kind":"matrix","dim":1,"entries":[[1,2,3]]})", "entries[0]");
  expect_parse("kind.json", R"({"format":1,"kind":"vector","dim":1,"entries":[1]})", "kind");
  expect_parse("format.json", R"({"format":7,"kind":"matrix","dim":1,"entries":[1]})", "format");
  expect_parse("garbage.json", "{\"format\": 1, ", "byte");
  expect_parse("dim.json", R"({"format":1,"kind":"matrix","dim":0,"entries":[]})", "dim");
  CHECK_THROWS_AS(io::read_operator(s.path("missing.json")), ParseError);
}

TEST_CASE("numbers and csv") {
  CHECK(io::number(NAN).is_null());
  CHECK(io::number(INFINITY).is_null());
  CHECK(io::number(0.5).get<double>() == 0.5);
  CHECK(std::stod(io::format_double(0.1)) == 0.1);
  io::Csv csv({"a", "b"});
  csv.row(std::vector<double>{1.0, 2.5});
  CHECK(csv.str() == "a,b\n1,2.5\n");
  CHECK_THROWS(csv.row(std::vector<double>{1.0}));
}

TEST_CASE("tolerance overrides") {
  ToleranceTable t;
  const double before = t["penrose"];
  t.apply_override("penrose=1e-6");
  CHECK(t["penrose"] == 1e-6);
  CHECK(before != 1e-6);
  CHECK_THROWS_AS(t.apply_override("no_such_key=1"), ParseError);
  CHECK_THROWS_AS(t.apply_override("penrose=-1"), ParseError);
  CHECK_THROWS_AS(t.apply_override("penrose=abc"), ParseError);
  CHECK_THROWS_AS(t.apply_override("penrose"), ParseError);
}

TEST_CASE("command line") {
  Scratch s;
  const std::string witness =
      s.file("w.json", R"({"format":1,"kind":"matrix","dim":2,"entries":[1,1,-1,1]})");
  const std::string out = s.path("out");

  SUBCASE("help") {
    const Run r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("solve-bvp") != std::string::npos);
  }
  SUBCASE("analyze reports the quarter-pi sector") {
    const Run r = invoke({"analyze", "--input", witness, "--out", out});
    CHECK(r.code == cli::ok);
    const auto body = report(out)["body"];
    CHECK(std::abs(body["accretivity"]["omega"].get<double>() - std::numbers::pi / 4) <= 1e-10);
    CHECK(fs::exists(out + "/boundary.csv"));
  }
  SUBCASE("pinv writes the inverse") {
    CHECK(invoke({"pinv", "--input", witness, "--out", out}).code == cli::ok);
    const Operator p = io::read_operator(out + "/pinv.json");
    CHECK(std::abs(p(0, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(p(0, 1) + 0.5) <= 1e-15);
  }
  SUBCASE("factorize is deterministic for a fixed seed") {
    const std::string s2 = s.file("s.json", R"({"format":1,"kind":"matrix","dim":2,"entries":[3,0,0,5]})");
    const std::string d = s.file("d.json", R"({"format":1,"kind":"matrix","dim":2,"entries":[1,0,0,2]})");
    CHECK(invoke({"factorize", "--input", d, "--input2", s2, "--out", out + "1", "--seed", "9"}).code == cli::ok);
    CHECK(invoke({"factorize", "--input", d, "--input2", s2, "--out", out + "2", "--seed", "9"}).code == cli::ok);
    CHECK(report(out + "1")["body"].dump() == report(out + "2")["body"].dump());
  }
  SUBCASE("scalar two-point problem") {
    const std::string t0 = s.file("t0.json", R"({"format":1,"kind":"matrix","dim":1,"entries":[0]})");
    const std::string s1 = s.file("s1.json", R"({"format":1,"kind":"matrix","dim":1,"entries":[1]})");
    const std::string u0 = s.file("u0.json", R"({"format":1,"kind":"vector","dim":1,"entries":[0]})");
    const std::string u1 =
        s.file("u1.json", R"({"format":1,"kind":"vector","dim":1,"entries":[1.1752011936438014]})");
    CHECK(invoke({"solve-bvp", "--input", t0, "--input2", s1, "--u0", u0, "--u1", u1, "--out", out}).code == cli::ok);
    CHECK(fs::exists(out + "/solution.csv"));
    // T = S = 0 makes the problem resonant
    CHECK(invoke({"solve-bvp", "--input", t0, "--input2", t0, "--u0", u0, "--u1", u1, "--out", out}).code ==
          cli::hypothesis_failure);
  }
  SUBCASE("exit statuses for bad input") {
    const std::string bad = s.file("bad.json", R"({"format":1,"kind":"matrix","dim":2,"entries":[1,2,3]})");
    Run r = invoke({"analyze", "--input", bad, "--out", out});
    CHECK(r.code == cli::parse_failure);
    CHECK(r.err.find("entries") != std::string::npos);
    CHECK(invoke({"analyze", "--input", s.path("nope.json"), "--out", out}).code == cli::parse_failure);
    CHECK(invoke({"analyze"}).code == cli::parse_failure);
    CHECK(invoke({"frobnicate"}).code == cli::parse_failure);
    CHECK(invoke({"analyze", "--input", witness, "--tol-override", "bogus=1", "--out", out}).code ==
          cli::parse_failure);
  }
  SUBCASE("demo refuses infeasible models") {
    const Run r = invoke({"demo-laplacian", "--eta1", "1", "--out", out});
    CHECK(r.code == cli::hypothesis_failure);
    CHECK(r.err.find("mode j = 1") != std::string::npos);
    CHECK(invoke({"demo-laplacian", "--xi-re", "1000", "--out", out}).code == cli::hypothesis_failure);
  }
  SUBCASE("demo writes the field") {
    CHECK(invoke({"demo-laplacian", "--modes", "8", "--grid", "17", "--out", out}).code == cli::ok);
    CHECK(fs::exists(out + "/field.csv"));
    CHECK(report(out)["body"]["oracle_gap"].get<double>() <= 1e-8);
  }
}
