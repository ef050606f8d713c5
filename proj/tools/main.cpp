#include "kspnet/commands.hpp"

int main(int argc, char **argv) { return kspnet::RunCli(argc, argv); }
