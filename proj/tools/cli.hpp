// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sparsecue::cli {

/// Exit codes of the sparsecue executable.
enum ExitCode : int {
  kOk = 0,
  kValidation = 1,  // validation, parse and usage errors
  kIo = 2,
  kInternal = 3,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparsecue::cli
