#include "qdisc/cli.hpp"

int main(int argc, char** argv) { return qdisc::cli::run_cli(argc, argv); }
