#include "macsim/cli.hpp"

#include <iostream>

int main(int argc, char **argv)
{
  return macsim::run_cli(argc, argv, std::cout, std::cerr);
}
