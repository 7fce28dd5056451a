#include "cli.hpp"

int main(int argc, char** argv) { return pdmp::cli::run(argc, argv); }
