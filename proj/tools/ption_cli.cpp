#include "ption/cli.hpp"

int main(int argc, char** argv) { return ption::cli::cli_main(argc, argv); }
