#include "commands.hpp"

int main(int argc, char** argv) { return gpwave::cli::run(argc, argv); }
