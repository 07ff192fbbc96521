#include "cusp/io.hpp"

int main(int argc, char** argv) { return cusp::io::cli_main(argc, argv); }
