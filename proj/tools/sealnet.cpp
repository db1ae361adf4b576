#include <iostream>

#include <sealnet/cli.hpp>

int main(int argc, char **argv)
{
    return sealnet::run_cli(argc, argv, std::cout, std::cerr);
}
