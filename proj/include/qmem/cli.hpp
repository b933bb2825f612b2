// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmem {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_domain = 3,
    exit_io = 4,
};

//! Runs `qmem` with `args` (program name excluded).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmem
