#include "ghsv/cli.hpp"

int main(int argc, char** argv) { return ghsv::cli::run(argc, argv); }
