#include "gaf/cli.hpp"

int main(int argc, char** argv) { return gaf::run_cli(argc, argv); }
