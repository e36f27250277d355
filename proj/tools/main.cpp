#include "matwalk/cli.hpp"

int main(int argc, char** argv) { return matwalk::run(argc, argv); }
