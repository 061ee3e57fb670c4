#include "cli.hpp"

int main(int argc, char** argv) { return ananet::cli::run(argc, argv); }
