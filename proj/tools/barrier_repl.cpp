#include "barrier_repl/cli.hpp"

int main(int argc, char** argv) { return barrier_repl::cli::main(argc, argv); }
