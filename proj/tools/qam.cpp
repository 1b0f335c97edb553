#include "qam/cli.hpp"

int main(int argc, char** argv) { return qam::cli::main(argc, argv); }
