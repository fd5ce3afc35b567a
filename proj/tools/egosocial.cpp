// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "egosocial/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return egosocial::run_cli(args, std::cout, std::cerr);
}
