#include "recede/cli.hpp"

int main(int argc, char** argv) { return recede::run_command(argc, argv); }
