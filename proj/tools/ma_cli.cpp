#include "ma/cli.hpp"

int main(int argc, char** argv) { return ma::cli_main(argc, argv); }
