#include "uavslice/cli.hpp"

int main(int argc, char** argv) { return uavslice::cli::run(argc, argv); }
