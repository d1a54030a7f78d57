#include "ldvdd/cli.hpp"

int main(int argc, char** argv) { return ldvdd::cli::run_cli(argc, argv); }
