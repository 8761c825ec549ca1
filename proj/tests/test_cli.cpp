#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pshosc/cli.hpp"
#include "pshosc/report.hpp"

using namespace pshosc;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "pshosc");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("region grammar") {
  auto d = std::get<Polydisc>(parse_region_spec("disc:c=1+2i,r=0.5"));
  CHECK(d.dim() == 1);
  CHECK(d.center()[0] == Complex(1, 2));
  CHECK(d.radii()[0] == 0.5);

  auto p = std::get<Polydisc>(parse_region_spec("polydisc:r=0.5;0.25"));
  CHECK(p.dim() == 2);
  CHECK(p.radii()[1] == 0.25);

  CHECK(std::holds_alternative<Segment>(parse_region_spec("segment:a=-0.27846,b=1")));
  CHECK(std::holds_alternative<AnisotropicBox>(parse_region_spec("box:c=0;0,r=0.01,a=1;2")));
  CHECK(std::holds_alternative<ConvexPolytope>(parse_region_spec("polytope:v=0;0/1;0/0;1")));

  CHECK_THROWS_AS(parse_region_spec("annulus:r=1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_region_spec("disc:c=0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_region_spec("disc:r=1,q=2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_region_spec("polydisc:c=0,r=1;1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_region_spec("disc:r=1,r=2"), std::invalid_argument);
}

TEST_CASE("function and quadrature grammar") {
  CHECK(parse_function_spec("m_log:m=2,dim=2").dim() == 2);
  CHECK(parse_function_spec("counterexample").dim() == 2);
  CHECK_THROWS_AS(parse_function_spec("nope"), std::invalid_argument);
  CHECK_THROWS_AS(parse_function_spec("log_abs:z0"), std::invalid_argument);

  QuadratureSpec q = parse_quad_spec("radial=24,tol=1e-8,seed=3", QuadratureSpec{});
  CHECK(q.radial_nodes == 24);
  CHECK(q.target_rel_error == 1e-8);
  CHECK(q.seed == 3u);
  CHECK(q.angular_nodes == QuadratureSpec{}.angular_nodes);
  CHECK_THROWS_AS(parse_quad_spec("radial=2x", QuadratureSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(parse_quad_spec("nodes=3", QuadratureSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(parse_quad_spec("tol", QuadratureSpec{}), std::invalid_argument);
}

TEST_CASE("csv quoting") {
  CsvTable t{{"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", ""}}};
  CHECK(t.render() == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
}

TEST_CASE("exit codes") {
  CHECK(run({"--help"}) == kExitPass);
  CHECK(run({}) == kExitUsage);
  CHECK(run({"osc", "uo", "--fn", "log_abs:z0=0"}) == kExitUsage);
  CHECK(run({"osc", "uo", "--fn", "bogus", "--region", "disc:r=1"}) == kExitUsage);
  CHECK(run({"gamma", "solve", "--output", "xml"}) == kExitUsage);
  CHECK(run({"gamma", "solve", "--quad", "tol=-1"}) == kExitUsage);
  CHECK(run({"bergman", "kernel", "--fn", "m_log:m=2", "--eps", "1.5"}) == kExitNumerical);
  CHECK(run({"osc", "counterexample", "--x", "-1"}) == kExitPass);
}

TEST_CASE("report files are deterministic and carry the config") {
  const auto dir = std::filesystem::temp_directory_path() / "pshosc_cli_test";
  std::filesystem::create_directories(dir);
  const std::string a = (dir / "a").string(), b = (dir / "b").string();
  REQUIRE(run({"remez", "sweep", "--count", "4", "--seed", "11", "--output", "both", "--out", a}) == kExitPass);
  REQUIRE(run({"remez", "sweep", "--count", "4", "--seed", "11", "--output", "both", "--out", b,
               "--workers", "2"}) == kExitPass);
  CHECK(slurp(a + ".json") == slurp(b + ".json"));
  CHECK(slurp(a + ".csv") == slurp(b + ".csv"));

  const Json j = Json::parse(slurp(a + ".json"));
  CHECK(j["artifact"]["name"] == kArtifactName);
  CHECK(j["command"] == "remez sweep");
  CHECK(j["config"]["seed"] == 11);
  CHECK(j["config"]["count"] == 4);
  CHECK(j["config"].contains("defaults"));
  CHECK(j["results"].size() == 4);
  CHECK_FALSE(j.contains("wall_time_s"));

  REQUIRE(run({"gamma", "solve", "--timing", "--out", a}) == kExitPass);
  CHECK(Json::parse(slurp(a + ".json")).contains("wall_time_s"));
  std::filesystem::remove_all(dir);
}
