#include "cantordyn/cli.hpp"
int main(int argc, char** argv) { return cantordyn::cli_main(argc, argv); }
