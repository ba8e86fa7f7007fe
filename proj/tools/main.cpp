#include "evrec/cli.hpp"

int main(int argc, char** argv) { return evrec::cli::run(argc, argv); }
