#include "romega/experiment.hpp"

int main(int argc, char** argv) { return romega::cli_dispatch(argc, argv); }
