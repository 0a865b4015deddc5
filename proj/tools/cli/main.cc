#include "cli/commands.h"

int main(int argc, char** argv) { return mcd::cli::run(argc, argv); }
