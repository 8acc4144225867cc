#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ks2d/cli.hpp"
#include "support.hpp"

using namespace ks2d;
using namespace ks2d::cli;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string s; std::getline(in, s);) lines.push_back(s);
  return lines;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string c; std::getline(in, c, ',');) out.push_back(c);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ks2d");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

// Power that puts a zero of the symbol on mode (2, 0) for J = 4 on [-1, 1].
std::string singular_power() {
  const double mu = -4.0 * std::pow(std::sin(2 * std::numbers::pi / 8), 2);
  const double l = 0.25 / (2.0 * 0.5 * -50.0 * mu);
  return format_double(std::log(l) / std::log(0.5));
}

}  // namespace

TEST_CASE("defaults are the manufactured parameter set") {
  const RunConfig c = parse_config_text("# nothing here\n\n");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(c.coefficients.q == doctest::Approx(5.5 * pi2));
  CHECK(c.coefficients.kappa == 1.0);
  CHECK(c.coefficients.lambda == doctest::Approx(-2 * pi2));
  CHECK(c.coefficients.alpha == doctest::Approx(1.0 / 3.0));
  CHECK(c.coefficients.beta == doctest::Approx(0.2));
  CHECK(c.L0 == -1.0);
  CHECK(c.L1 == 1.0);
  CHECK(c.t0 == 0.0);
  CHECK(c.T == 1.0);
  CHECK(c.forcing_mode == mms::ForcingMode::kResidual);
  CHECK(c.initial.kind == InitialData::Kind::kManufactured);
}

TEST_CASE("file values, flag overrides and step count") {
  const RunConfig c = parse_config_text("J = 12  # comment\npower=4.01\ninitial = constant:2.5\nforcing = none\n",
                                        {{"J", "10"}, {"power", "3.01"}});
  CHECK(c.J == 10);
  CHECK(c.grid().N == 128);
  CHECK(c.initial.kind == InitialData::Kind::kConstant);
  CHECK(c.initial.constant == 2.5);
  CHECK(c.forcing_mode == mms::ForcingMode::kNone);

  const auto dir = testing::scratch_dir("cfg");
  std::ofstream(dir / "run.cfg") << "beta = 0\nout_dir = " << (dir / "out").string() << "\n";
  const RunConfig f = parse_config(dir / "run.cfg");
  CHECK(f.coefficients.beta == 0.0);
  CHECK(f.out_dir == dir / "out");
  CHECK_THROWS_AS(parse_config(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("config errors name the key and the line") {
  try {
    parse_config_text("J = 10\nq = abc\n");
    FAIL("expected TypeError");
  } catch (const TypeError& e) {
    const std::string what = e.what();
    CHECK(what.find("'q'") != std::string::npos);
    CHECK(what.find("line 2") != std::string::npos);
  }
  try {
    parse_config_text("", {{"J", "ten"}});
    FAIL("expected TypeError");
  } catch (const TypeError& e) {
    CHECK(std::string(e.what()).find("'J'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("colour = blue\n"), UnknownKey);
  CHECK_THROWS_AS(parse_config_text("J =\n"), MissingKey);
  CHECK_THROWS_AS(parse_config_text("just words\n"), MissingKey);
  CHECK_THROWS_AS(parse_config_text("initial = sometimes\n"), TypeError);
  CHECK_THROWS_AS(parse_config_text("J = 1\n"), TypeError);
}

TEST_CASE("shortest round-trip number format") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(128.0) == "128");
  for (double v : {1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numbers::pi}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("field CSV round trip") {
  const auto dir = testing::scratch_dir("field");
  Matrix m{{1.0 / 3.0, -2.0}, {1e-20, 4.0}};
  write_field_csv(dir / "f.csv", m);
  CHECK(read_field_csv(dir / "f.csv") == m);
  std::ofstream(dir / "ragged.csv") << "1,2\n3\n";
  CHECK_THROWS_AS(read_field_csv(dir / "ragged.csv"), ShapeMismatch);
}

TEST_CASE("run: manufactured case writes norms, snapshots and report") {
  const auto dir = testing::scratch_dir("run");
  RunConfig c = parse_config_text("", {{"J", "10"}, {"power", "3.01"}, {"snapshot_every", "64"}});
  c.out_dir = dir;
  std::ostringstream out, err;
  CHECK(cmd_run(c, out, err) == kExitOk);
  const auto norms = read_lines(dir / "norms.csv");
  CHECK(norms.size() == 130);  // header + 129 levels
  CHECK(norms.front() == "n,t,norm_U,norm_V");
  for (long long n : {0, 64, 128}) {
    char name[32];
    std::snprintf(name, sizeof name, "U_%06lld.csv", n);
    CHECK(fs::exists(dir / name));
    std::snprintf(name, sizeof name, "V_%06lld.csv", n);
    CHECK(fs::exists(dir / name));
  }
  CHECK_FALSE(fs::exists(dir / "U_000001.csv"));
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  for (const char* key : {"config", "Er", "C", "N", "wall_ms", "status"}) CHECK(report.contains(key));
  CHECK(report["N"] == 128);
  CHECK(report["status"] == "completed");
  CHECK(report["config"]["J"] == 10);
  CHECK(report["Er"].is_number());
}

TEST_CASE("run: constant initial data gives identical norm rows") {
  const auto dir = testing::scratch_dir("const");
  RunConfig c = parse_config_text("initial = constant:0.3\nforcing = none\n");
  c.out_dir = dir;
  std::ostringstream out, err;
  CHECK(cmd_run(c, out, err) == kExitOk);
  const auto rows = read_lines(dir / "norms.csv");
  REQUIRE(rows.size() > 2);
  const auto first = split(rows[1]);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const auto r = split(rows[i]);
    CHECK(r[2] == first[2]);
    CHECK(r[3] == first[3]);
  }
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["Er"].is_null());
}

TEST_CASE("run: a singular step operator exits 2 and names it") {
  const auto dir = testing::scratch_dir("sing");
  RunConfig c = parse_config_text("q = -50\nkappa = 0\nlambda = 0\nalpha = 0.5\nJ = 4\nforcing = none\n",
                                  {{"power", singular_power()}});
  c.out_dir = dir;
  std::ostringstream out, err;
  CHECK(cmd_run(c, out, err) == kExitNearSingular);
  CHECK(err.str().find("near_singular") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["status"] == "near_singular");
}

TEST_CASE("run: blow-up exits 3 with the failing step") {
  const auto dir = testing::scratch_dir("blow");
  // V amplification for beta < 1/4 overflows within the 1023 steps of J = 20.
  RunConfig c = parse_config_text("J = 20\npower = 3.01\n");
  c.out_dir = dir;
  std::ostringstream out, err;
  const int code = cmd_run(c, out, err);
  CHECK(code == kExitNonFinite);
  CHECK(err.str().find("at step") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["status"] == "non_finite");
  CHECK(report["failed_step"].is_number());
}

TEST_CASE("run: initial data from file") {
  const auto dir = testing::scratch_dir("file");
  write_field_csv(dir / "phi.csv", Matrix::constant(5, 5, 1.5));
  RunConfig c = parse_config_text("J = 4\nforcing = none\ninitial = file:" + (dir / "phi.csv").string() + "\n");
  c.out_dir = dir / "out";
  std::ostringstream out, err;
  CHECK(cmd_run(c, out, err) == kExitOk);
  c.J = 5;
  CHECK_THROWS_AS(cmd_run(c, out, err), ShapeMismatch);
}

TEST_CASE("table: rows, step counts and byte-stable output") {
  const auto dir = testing::scratch_dir("table");
  RunConfig c;
  c.out_dir = dir / "a";
  std::ostringstream out, err;
  CHECK(cmd_table(c, 3, {10, 12, 14}, 2, out, err) == kExitOk);
  const auto lines = read_lines(dir / "a" / "table3.csv");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].starts_with("J,N,computed_N,Er,C,wall_ms,status"));
  const long long want[] = {128, 220, 350};
  for (int i = 0; i < 3; ++i) {
    const auto cells = split(lines[i + 1]);
    CHECK(std::stoll(cells[2]) == want[i]);
    CHECK(std::stoll(cells[1]) == want[i]);
  }
  CHECK(fs::exists(dir / "a" / "table3.json"));

  c.out_dir = dir / "b";
  CHECK(cmd_table(c, 3, {10, 12, 14}, 1, out, err) == kExitOk);
  const auto again = read_lines(dir / "b" / "table3.csv");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto x = split(lines[i]);
    auto y = split(again[i]);
    x.erase(x.begin() + 5);
    y.erase(y.begin() + 5);
    CHECK(x == y);
  }

  c.out_dir = dir / "c";
  CHECK(cmd_table(c, 1, {10}, 1, out, err) == kExitOk);
  CHECK(read_lines(dir / "c" / "table1.csv").size() == 2);

  CHECK(cmd_table(c, 3, {}, 1, out, err) == kExitUsage);
  CHECK(cmd_table(c, 4, {10}, 1, out, err) == kExitUsage);
  CHECK(default_table_J(3) == std::vector<int>{10, 12, 14, 16, 18, 20, 22, 24, 25, 30, 50});
}

TEST_CASE("verify: default passes, corruption is named, size limit 2 runs") {
  std::ostringstream out;
  CHECK(cmd_verify({}, out) == kExitOk);
  for (const char* name : {"eigen residual", "oracle equivalence", "steady state", "truncation slopes"})
    CHECK(out.str().find(std::string("PASS ") + name) != std::string::npos);

  std::ostringstream bad;
  CHECK(cmd_verify({6, true}, bad) == kExitFailure);
  CHECK(bad.str().find("FAIL eigen residual") != std::string::npos);

  std::ostringstream small;
  CHECK(cmd_verify({2, false}, small) == kExitOk);
  CHECK(small.str().find("J<=2") != std::string::npos);
}

TEST_CASE("spectrum output") {
  const auto dir = testing::scratch_dir("spectrum");
  auto min_k = [&](const RunConfig& c, std::string& warn) {
    std::ostringstream out, err;
    CHECK(cmd_spectrum(c, out, err) == kExitOk);
    warn = err.str();
    const auto lines = read_lines(c.out_dir / "spectrum.csv");
    return std::stod(split(lines.back()).back());
  };
  std::string warn;

  RunConfig c = parse_config_text("alpha = 0\nJ = 6\n");
  c.out_dir = dir;
  CHECK(min_k(c, warn) == 1.0);
  const auto lines = read_lines(dir / "spectrum.csv");
  CHECK(lines.size() == 1 + 49 + 1);
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) CHECK(split(lines[i]).back() == "1");

  c = parse_config_text("J = 10\npower = 4.01\n");
  c.out_dir = dir;
  CHECK(min_k(c, warn) > 0.9);
  CHECK(warn.empty());

  c = parse_config_text("q = -50\nkappa = 0\nalpha = 0.5\nJ = 4\n", {{"power", singular_power()}});
  c.out_dir = dir;
  CHECK(min_k(c, warn) < 1e-6);
  CHECK(warn.find("warning") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  const auto dir = testing::scratch_dir("argv");
  CHECK(invoke({"table", "--table", "3", "--Js", "", "--out_dir", dir.string()}) == kExitUsage);
  CHECK(invoke({"run", "--J", "abc"}) == kExitUsage);
  CHECK(invoke({"run", "--nonsense", "1"}) == kExitUsage);
  CHECK(invoke({}) == kExitUsage);
  CHECK(invoke({"run", "--J", "10", "--power", "3.01", "--out_dir", dir.string()}) == kExitOk);
  CHECK(read_lines(dir / "norms.csv").size() == 130);
  CHECK(invoke({"spectrum", "--J", "4", "--out_dir", dir.string()}) == kExitOk);
  CHECK(invoke({"verify", "--size-limit", "2"}) == kExitOk);
}
