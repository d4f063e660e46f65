#include <iostream>

#include "readmit/app/commands.hpp"

int main(int argc, char** argv) { return readmit::app::run_cli(argc, argv, std::cout, std::cerr); }
