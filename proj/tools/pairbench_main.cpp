#include "pairbench/cli.hpp"

int main(int argc, char** argv) { return pairbench::run_cli(argc, argv); }
