// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "qmem/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return qmem::run_cli(args, std::cout, std::cerr);
}
