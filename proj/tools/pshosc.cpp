#include "pshosc/cli.hpp"

int main(int argc, char** argv) { return pshosc::run_cli(argc, argv); }
