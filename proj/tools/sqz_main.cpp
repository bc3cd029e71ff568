#include "sqz/cli.hpp"

int main(int argc, char** argv) { return sqz::run_cli(argc, argv); }
