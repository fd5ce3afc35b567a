// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace egosocial {

/// Entry point of the `egosocial` tool. Returns the process exit status.
/// Subcommands: validate, cluster, segment, profile, eval, synth, render, pipeline.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace egosocial
