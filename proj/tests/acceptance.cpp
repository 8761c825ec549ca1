#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "pshosc/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Runs acceptance criteria and prints one PASS/FAIL line per criterion", "pshosc_acceptance"};
  std::string only = "1-13";
  pshosc::AcceptanceOptions opt;
  app.add_option("--criterion", only, "Criteria, e.g. 4 or 1,3,5-7");
  app.add_option("--cli", opt.cli_path, "CLI binary used by the determinism criterion");
  app.add_option("--seed", opt.seed, "Seed");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  try {
    for (int id : pshosc::parse_criterion_list(only)) {
      const auto r = pshosc::run_criterion(id, opt);
      std::printf("[%s] criterion %d (%s): %s [%.2f s]\n", r.pass ? "PASS" : "FAIL", id, r.title.c_str(),
                  r.summary.c_str(), r.seconds);
      std::fflush(stdout);
      failed += !r.pass;
    }
  } catch (const std::exception& e) {
    std::printf("[FAIL] error: %s\n", e.what());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
