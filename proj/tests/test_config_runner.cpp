#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "exradon/config.hpp"
#include "exradon/io.hpp"
#include "exradon/runner.hpp"

using namespace exradon;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("exradon_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal forward config gets defaults") {
  const auto cfg = parse_config(R"json({"command": "forward", "field": "gaussian(1.0)"})json");
  CHECK(cfg.command == "forward");
  CHECK(cfg.grid.theta_count == 8);
  CHECK(cfg.grid.p_count == 32);
  CHECK(cfg.lambda == 0.0);
  CHECK(cfg.region == "none");
}

TEST_CASE("validation collects violations") {
  CHECK_THROWS_WITH_AS(
      parse_config(R"json({"command": "forward", "grid": {"theta_count": 0}})json"),
      doctest::Contains("theta_count"), Error);
  CHECK_THROWS_WITH_AS(parse_config(R"json({"command": "forward", "bogus": 1})json"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(parse_config(R"json({"command": "forward", "grid": {"nope": 1}})json"),
                       doctest::Contains("grid.nope"), Error);
  CHECK_THROWS_AS(parse_config("not json"), Error);
  CHECK_THROWS_WITH_AS(parse_config(R"json({"command": "frob"})json"),
                       doctest::Contains("unknown command"), Error);
}

TEST_CASE("field and region spec strings") {
  CHECK(parse_field_spec("gaussian(1.5)")->id() == "gaussian(1.5)");
  CHECK(parse_field_spec("stretched(0.8, im)")->id() == "stretched(0.8,im)");
  const FieldPtr piped =
      parse_field_spec("gaussian(1.0) | transport([[2,0],[0,1]],[0,0]) | mollify(0.25)");
  CHECK(piped->id() == "gaussian(1)|transport([[2,0],[0,1]],[0,0])|mollify(0.25)");
  CHECK_THROWS_AS(parse_field_spec("warble(1)"), Error);
  CHECK_THROWS_AS(parse_field_spec("gaussian(1) | transport(1)"), Error);

  CHECK_FALSE(parse_region_spec("none").has_value());
  CHECK(parse_region_spec("quadrant")->halfplanes().size() == 2);
  CHECK(parse_region_spec("halfstrip(1.0)")->halfplanes().size() == 3);
  const auto poly = parse_region_spec("polyhedral([0, 1], [90, 2], [180, 3])");
  CHECK(poly->halfplanes().size() == 3);
  CHECK_THROWS_AS(parse_region_spec("wedge(95, 0)"), Error);
}

TEST_CASE("counterexample configs are checked for cone coverage") {
  // beta = 0.8 decays on a cone of half-angle 112.5 deg; the hole must cover
  // the remaining 67.5 deg around the negative axis.
  CHECK_NOTHROW(parse_config(R"json({"command": "counterexample",
      "field": "stretched(0.8, re)", "region": "wedge(70, 180)"})json"));
  CHECK_THROWS_WITH_AS(parse_config(R"json({"command": "counterexample",
      "field": "stretched(0.8, re)", "region": "wedge(50, 180)"})json"),
                       doctest::Contains("non-decaying"), Error);
  CHECK_THROWS_WITH_AS(parse_config(R"json({"command": "counterexample",
      "field": "stretched(0.8, re)", "region": "wedge(70, 180)", "lambda": 0.5})json"),
                       doctest::Contains("classical"), Error);
  CHECK_THROWS_AS(parse_config(R"json({"command": "counterexample",
      "field": "gaussian(1.0)", "region": "wedge(70, 180)"})json"),
                  Error);
  // beta = 0.3 only needs the branch cut covered.
  CHECK_NOTHROW(parse_config(R"json({"command": "counterexample",
      "field": "stretched(0.3, re)", "region": "wedge(5, 180)"})json"));
}

TEST_CASE("forward run on the zero field writes all-zero CSV and passes") {
  TempDir dir("fwd_zero");
  auto cfg = parse_config(R"json({"command": "forward", "field": "zero",
    "grid": {"theta_count": 3, "theta_step_deg": 30, "p_start": -1,
             "p_count": 5, "p_step": 0.5}})json");
  cfg.output_dir = (dir.path / "out").string();
  const RunResult res = run(cfg);
  CHECK(res.exit_code == 0);

  const std::string csv = slurp(dir.path / "out" / "sinogram.csv");
  CHECK(csv.rfind("theta_rad,p,value,mask,err_estimate\n", 0) == 0);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.find("0.0000000000000000e+00,exterior") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 15);
  CHECK(fs::exists(dir.path / "out" / "manifest.json"));
  CHECK(fs::exists(dir.path / "out" / "sinogram.svg"));
}

TEST_CASE("runs are byte-identical across repeats") {
  auto cfg = parse_config(R"json({"command": "forward", "field": "gaussian(1.0)", "seed": 7,
    "grid": {"theta_count": 4, "theta_step_deg": 45, "p_start": -2,
             "p_count": 9, "p_step": 0.5}})json");
  TempDir a("det_a"), b("det_b");
  cfg.output_dir = (a.path / "out").string();
  REQUIRE(run(cfg).exit_code == 0);
  cfg.output_dir = (b.path / "out").string();
  REQUIRE(run(cfg).exit_code == 0);
  for (const char* name : {"sinogram.csv", "report.json", "sinogram.svg", "manifest.json"}) {
    CHECK(slurp(a.path / "out" / name) == slurp(b.path / "out" / name));
  }
}

TEST_CASE("operational errors exit 1 and leave an error report") {
  TempDir dir("err");
  // s outside the strip is an input problem, not a verification failure.
  auto cfg = parse_config(R"json({"command": "laplace",
      "laplace": {"profile": "exp_abs(1.0)", "s_values": [1.5], "n_max": 4}})json");
  cfg.output_dir = (dir.path / "out").string();
  const RunResult res = run(cfg);
  CHECK(res.exit_code == 1);
  CHECK(fs::exists(dir.path / "out" / "error.json"));
}

TEST_CASE("laplace run emits the report") {
  TempDir dir("laplace");
  auto cfg = parse_config(R"json({"command": "laplace",
      "laplace": {"profile": "exp_abs(1.0)", "s_values": [0.3, 0.5],
                  "N_values": [4, 8], "n_max": 8}})json");
  cfg.output_dir = (dir.path / "out").string();
  const RunResult res = run(cfg);
  CHECK(res.exit_code == 0);
  const std::string rep = slurp(dir.path / "out" / "laplace.json");
  CHECK(rep.find("\"verdict\": \"nonzero\"") != std::string::npos);
  CHECK(rep.find("\"satisfied\": true") != std::string::npos);
}

TEST_CASE("probe run matches expectations") {
  TempDir dir("probe");
  auto cfg = parse_config(R"json({"command": "probe", "field": "stretched(0.3, re)",
      "probe": {"theta0_deg": 0, "half_width_deg": 10, "p0": 0.5, "k_max": 1,
                "p_samples": [1.0],
                "expect": {"b": true, "c": true, "d": false, "e": true}}})json");
  cfg.output_dir = (dir.path / "out").string();
  const RunResult res = run(cfg);
  CHECK(res.exit_code == 0);
  const std::string rep = slurp(dir.path / "out" / "probe.json");
  CHECK(rep.find("\"quantifier_note\"") != std::string::npos);
}

TEST_CASE("helgason run with the gaussian passes at lambda zero") {
  TempDir dir("helg");
  auto cfg = parse_config(R"json({"command": "helgason", "field": "gaussian(1.0)",
      "helgason": {"k_max": 1, "p_window": [-8, 8]},
      "grid": {"theta_count": 8, "theta_step_deg": 45, "p_start": -4,
               "p_count": 2, "p_step": 4}})json");
  cfg.output_dir = (dir.path / "out").string();
  const RunResult res = run(cfg);
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir.path / "out" / "moments.svg"));
}

TEST_CASE("fnv hash and atomic write") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
  TempDir dir("io");
  const fs::path f = dir.path / "nested" / "file.txt";
  write_file_atomic(f.string(), "payload");
  CHECK(slurp(f) == "payload");
  CHECK_FALSE(fs::exists(f.string() + ".tmp"));
}
