#include "teichlab/run.hpp"

int main(int argc, char** argv) { return teichlab::cli_main(argc, argv); }
