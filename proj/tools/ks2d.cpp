#include "ks2d/cli.hpp"

int main(int argc, char** argv) { return ks2d::cli::main_entry(argc, argv); }
