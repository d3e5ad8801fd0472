#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ruleweave/codec.hpp"

namespace ruleweave {

struct FiredRule {
  std::string rule;
  NodeId node = 0;
  bool operator==(const FiredRule&) const = default;
};

struct EvalIssue {
  std::string rule;
  NodeId node = 0;
  std::string message;
  bool operator==(const EvalIssue&) const = default;
};

/// Outcome of one attribute update: which rules fired (in declaration
/// order, including cascaded firings), how many conditions were evaluated,
/// per-rule evaluation errors, and the deepest cascade level reached.
struct TriggerReport {
  std::vector<FiredRule> fired;
  std::uint64_t evaluated = 0;
  std::vector<EvalIssue> errors;
  int cascade_depth = 0;
};

}  // namespace ruleweave
