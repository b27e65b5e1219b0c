#include "cli.hpp"

int main(int argc, char** argv) { return bcnls::cli::run(argc, argv); }
