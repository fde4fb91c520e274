#include "ghz3/cli.hpp"

int main(int argc, char** argv) { return ghz3::cli::run(argc, argv); }
