#include "framesim/cli.hpp"

int main(int argc, char** argv) { return framesim::cli::run(argc, argv); }
