#pragma once
// Command-line surface: one subcommand per toolkit area, JSON/CSV reports.
// Exit codes: 0 success (condition holds), 2 condition violated,
// 3 inconclusive, 1 usage/parse/runtime error.

namespace recede {

int run_command(int argc, const char* const* argv);

}  // namespace recede
