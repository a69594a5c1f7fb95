#include <ellipsum/cli.hpp>

int main(int argc, char** argv) { return ellipsum::cli::run(argc, argv); }
