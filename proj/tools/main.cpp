#include "cli.hpp"

int main(int argc, char** argv) { return dyno::cli_entry(argc, argv); }
