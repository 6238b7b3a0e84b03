#include "kernsel/cli.hpp"

int main(int argc, char** argv) { return kernsel::cli::run(argc, argv); }
