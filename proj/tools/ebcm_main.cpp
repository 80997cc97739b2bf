#include "ebcm/commands.hpp"

int main(int argc, char** argv) { return ebcm::run_cli(argc, argv); }
