#include "quadopo/cli.hpp"

int main(int argc, char** argv) { return quadopo::cli::run(argc, argv); }
