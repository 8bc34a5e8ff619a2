#include "dsk/cli.hpp"

int main(int argc, char** argv) { return dsk::run_cli(argc, argv); }
