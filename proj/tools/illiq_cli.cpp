#include "cli.hpp"

int main(int argc, char** argv) { return illiq::cli::main(argc, argv); }
