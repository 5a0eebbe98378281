#include "cli.hpp"

int main(int argc, char** argv) { return dyson::cli::main_entry(argc, argv); }
