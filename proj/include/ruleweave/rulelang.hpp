#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ruleweave {

enum class CompareOp { Eq, Neq, Gt, Gte, Lt, Lte };

const char* to_string(CompareOp op);

/// Decimal literal. Lexemes without '.' or exponent parse as Int-compatible
/// (Float on int64 overflow); coercion happens at evaluation time.
struct NumberLit {
  bool is_float = false;
  std::int64_t int_value = 0;
  double float_value = 0.0;

  bool operator==(const NumberLit& o) const {
    if (is_float != o.is_float) return false;
    return is_float ? float_value == o.float_value : int_value == o.int_value;
  }
};

/// `building.Room.temperature`: all segments but the last form the class
/// path, the final segment is the attribute.
struct AttributeRef {
  std::string class_path;
  std::string attribute;
  bool operator==(const AttributeRef&) const = default;
};

struct StringLit {
  std::string text;
  bool operator==(const StringLit&) const = default;
};

using Term = std::variant<AttributeRef, NumberLit, StringLit>;

struct Condition {
  bool negated = false;
  Term left;
  CompareOp op = CompareOp::Eq;
  Term right;
  bool operator==(const Condition&) const = default;
};

struct OperationCall;

/// One `then` pipeline: operations chained with '.', results flowing from
/// each operation into the next.
struct ActionTask {
  std::vector<OperationCall> operations;
  bool operator==(const ActionTask&) const;
};

using ActionArg = std::variant<std::string, ActionTask>;  // StringArg | TaskArg

struct OperationCall {
  std::string name;
  std::vector<ActionArg> args;
  bool operator==(const OperationCall&) const = default;
};

struct RuleDef {
  std::string name;
  Condition condition;
  ActionTask action;
  bool operator==(const RuleDef&) const = default;
};

/// Parses a `.rules` file into declaration-ordered RuleDefs. Strings accept
/// single or double quotes with \\, \', \" escapes; `#` starts a line
/// comment. Errors carry line/column and the expected-token set.
std::vector<RuleDef> parse_rules(std::string_view text);

/// Canonical text form; parse_rules(pretty_print(rules)) is structurally
/// identical to rules.
std::string pretty_print(const std::vector<RuleDef>& rules);

std::string print_task(const ActionTask& task);
std::string print_condition(const Condition& cond);

}  // namespace ruleweave
