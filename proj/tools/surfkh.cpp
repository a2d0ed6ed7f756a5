#include "surfkh/cli.hpp"

int main(int argc, char** argv) { return surfkh::cli::run(argc, argv); }
