#include "warpforge/cli.hpp"

int main(int argc, char** argv) { return warpforge::cli::run(argc, argv); }
