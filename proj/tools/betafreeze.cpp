#include "betafreeze/cli.hpp"

int main(int argc, char** argv) { return betafreeze::cli::run(argc, argv); }
