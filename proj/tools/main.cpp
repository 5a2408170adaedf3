#include "gradspace/cli.hpp"

int main(int argc, char** argv) { return gradspace::cli::run(argc, argv); }
