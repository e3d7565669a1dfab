#include "eblab/cli.hpp"

int main(int argc, char** argv) { return eblab::cli::run(argc, argv); }
