#include "monoslicer/cli.hpp"

int main(int argc, char** argv) { return monoslicer::cli::run(argc, argv); }
