#include "delaydim/cli.hpp"

int main(int argc, char** argv) { return delaydim::run_cli(argc, argv); }
