#include "dwv/cli.hpp"

int main(int argc, char** argv) { return dwv::run_cli(argc, argv); }
