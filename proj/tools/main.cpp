#include "fmrcc/cli.hpp"

int main(int argc, char** argv) { return fmrcc::cli::run(argc, argv); }
