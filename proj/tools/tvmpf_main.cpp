#include "tvmpf/cli.hpp"

int main(int argc, char** argv) { return tvmpf::run_cli(argc, argv); }
