#include "specrec/cli.hpp"

int main(int argc, char** argv) { return specrec::cli::run(argc, argv); }
