#pragma once
// Command-line driver: mini-grammar parsing, subcommands and report emission.

#include <string>
#include <vector>

#include "pshosc/core.hpp"
#include "pshosc/quad.hpp"
#include "pshosc/report.hpp"

namespace pshosc {

enum ExitCode : int { kExitPass = 0, kExitAssertion = 1, kExitNumerical = 2, kExitUsage = 64 };

/// "name:key=value,key=value" into a catalog function.
PshFunction parse_function_spec(const std::string& spec);

/// disc:c=0,r=1 | polydisc:c=0;0,r=0.5;0.25 | segment:a=-0.27846,b=1 |
/// box:c=0;0,r=0.01,a=1;2 | polytope:v=0;0/1;0/0;1
Region parse_region_spec(const std::string& spec);

/// radial=..,angular=..,tol=..,refine=..,mc=..,seed=.. applied over `base`.
QuadratureSpec parse_quad_spec(const std::string& spec, QuadratureSpec base);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string render() const;
};

int run_cli(int argc, char** argv);

}  // namespace pshosc
