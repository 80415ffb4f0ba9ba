#include "torus_vrep/cli.hpp"

int main(int argc, char** argv) { return tvr::run(argc, argv); }
