#include "rgl/cli.hpp"

int main(int argc, char** argv) { return rgl::cli_main(argc, argv); }
