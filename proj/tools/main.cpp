#include "cli.hpp"

int main(int argc, char** argv) { return mrwp::cli::run(argc, argv); }
