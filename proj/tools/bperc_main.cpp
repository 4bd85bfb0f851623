#include "bperc/cli.hpp"

int main(int argc, char** argv) { return bperc::run_cli(argc, argv); }
