#include "hofa/cli.hpp"

int main(int argc, char** argv) { return hofa::run_cli(argc, argv); }
