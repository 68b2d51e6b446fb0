#include "tradenet/cli.hpp"

int main(int argc, char** argv) { return tn::run_cli(argc, argv); }
