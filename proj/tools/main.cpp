#include "cosim/cli.hpp"

int main(int argc, char** argv) { return cosim::run_cli(argc, argv); }
