#include "epps/cli.hpp"

int main(int argc, char** argv) { return epps::cli::run(argc, argv); }
