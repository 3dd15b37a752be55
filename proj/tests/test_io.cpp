#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qdecay/gridio.hpp"
#include "qdecay/report.hpp"

using namespace qdecay;
using Catch::Approx;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("fmt_double") {
  SECTION("round-trips exactly") {
    for (double v : {0.1, -3.5e-12, 1.0 / 3.0, 6.02214076e23, 0.0}) {
      const std::string s = fmt_double(v);
      REQUIRE(std::stod(s) == v);
    }
  }
  SECTION("shortest form for simple values") {
    REQUIRE(fmt_double(0.5) == "0.5");
    REQUIRE(fmt_double(1.0) == "1");
  }
  SECTION("non-finite spellings") {
    REQUIRE(fmt_double(std::numeric_limits<double>::infinity()) == "inf");
    REQUIRE(fmt_double(-std::numeric_limits<double>::infinity()) == "-inf");
    REQUIRE(fmt_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  }
}

TEST_CASE("grid files") {
  SECTION("position grid round trip") {
    const auto p = temp_file("qdecay_test_pos.txt");
    std::string text = "# sampled packet\nposition 0.25\n";
    for (int i = 0; i < 32; ++i) {
      const double x = -4.0 + 0.25 * i;
      text += fmt_double(x) + " " + fmt_double(std::exp(-x * x)) + " 0\n";
    }
    write_file(p, text);
    const auto wf = read_grid_file(p.string());
    REQUIRE(wf.kind() == WaveFunction::Kind::PositionGrid);
    REQUIRE(wf.pgrid()->samples.size() == 32);
    REQUIRE(wf.pgrid()->dx == 0.25);
    REQUIRE(wf.pgrid()->x_min == -4.0);
    REQUIRE(wf.psi(0.0).real() == Approx(1.0).epsilon(1e-12));
    std::filesystem::remove(p);
  }

  SECTION("momentum header is honoured") {
    const auto p = temp_file("qdecay_test_mom.txt");
    std::string text = "momentum 0.5\n";
    for (int i = 0; i < 20; ++i)
      text += fmt_double(-5.0 + 0.5 * i) + " 0.1 0.05\n";
    write_file(p, text);
    const auto wf = read_grid_file(p.string());
    REQUIRE(wf.kind() == WaveFunction::Kind::MomentumGrid);
    std::filesystem::remove(p);
  }

  SECTION("malformed inputs are rejected") {
    const auto p = temp_file("qdecay_test_bad.txt");
    write_file(p, "lattice 0.5\n0 1 0\n");
    REQUIRE_THROWS_AS(read_grid_file(p.string()), std::invalid_argument);

    write_file(p, "position 0.5\n0 1 0\n0.5 1 0\n");  // too few samples
    REQUIRE_THROWS_AS(read_grid_file(p.string()), std::invalid_argument);

    std::string text = "position 0.5\n";
    for (int i = 0; i < 20; ++i) text += fmt_double(0.5 * i) + " 1 0\n";
    text += "11.7 1 0\n";  // breaks uniform spacing
    write_file(p, text);
    REQUIRE_THROWS_AS(read_grid_file(p.string()), std::invalid_argument);

    REQUIRE_THROWS_AS(read_grid_file("/nonexistent/qdecay.txt"),
                      std::invalid_argument);
    std::filesystem::remove(p);
  }
}
