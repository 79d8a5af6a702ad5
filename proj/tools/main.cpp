#include "dunce/cli.hpp"

int main(int argc, char** argv) { return dunce::cli::dispatch(argc, argv); }
