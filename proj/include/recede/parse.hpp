#pragma once

#include <string>
#include <vector>

#include "recede/models.hpp"

namespace recede {

// Problem documents are strict JSON: unknown keys are errors, infinities are
// the strings "inf"/"-inf". Non-fatal notes (e.g. "Q symmetrized") land in
// *warnings when provided.
ProblemSpec parse_problem(const std::string& text, std::vector<std::string>* warnings = nullptr);

std::string serialize_problem(const ProblemSpec& p);

}  // namespace recede
