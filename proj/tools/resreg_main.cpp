#include "resreg/experiments.hpp"

int main(int argc, char** argv) { return resreg::run_cli(argc, argv); }
