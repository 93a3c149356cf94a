#include "qsync/cli.hpp"

int main(int argc, char** argv) { return qsync::cli::run_cli(argc, argv); }
