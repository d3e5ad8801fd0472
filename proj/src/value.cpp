#include "ruleweave/value.hpp"

#include <charconv>

namespace ruleweave {

const char* to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Bool: return "Bool";
    case ValueKind::Int: return "Int";
    case ValueKind::Float: return "Float";
    case ValueKind::String: return "String";
  }
  return "?";
}

std::string format_float(double d) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  // to_chars prints integral doubles without a marker
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string Value::repr() const {
  switch (kind()) {
    case ValueKind::Bool: return as_bool() ? "true" : "false";
    case ValueKind::Int: return std::to_string(as_int());
    case ValueKind::Float: return format_float(as_float());
    case ValueKind::String: return '"' + as_string() + '"';
  }
  return "?";
}

}  // namespace ruleweave
