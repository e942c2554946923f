#include "mmfp/cli.hpp"

int main(int argc, char** argv) { return mmfp::cli_main(argc, argv); }
