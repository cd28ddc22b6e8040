// SPDX-License-Identifier: Apache-2.0
#include <pagezip/cli/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    auto args = std::vector<std::string>(argv + 1, argv + argc);
    return pagezip::runCli(args, std::cout, std::cerr);
}
