#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace ruleweave {

enum class ValueKind : std::uint8_t { Bool = 1, Int = 2, Float = 3, String = 4 };

const char* to_string(ValueKind kind);

/// Tagged attribute value. The tag must match the declared attribute type
/// when stored on a data node; rule and condition nodes are untyped.
class Value {
 public:
  static Value boolean(bool b) { return Value(b); }
  static Value integer(std::int64_t i) { return Value(i); }
  static Value floating(double d) { return Value(d); }
  static Value string(std::string s) { return Value(std::move(s)); }

  ValueKind kind() const { return static_cast<ValueKind>(v_.index() + 1); }

  bool as_bool() const { return std::get<bool>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_float() const { return std::get<double>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }

  bool operator==(const Value&) const = default;

  /// Readable form for diagnostics and reports ("18", "18.5", "\"on\"", "true").
  std::string repr() const;

 private:
  template <typename T>
  explicit Value(T v) : v_(std::move(v)) {}

  std::variant<bool, std::int64_t, double, std::string> v_;
};

/// Formats a double so it survives a parse round trip ("18" becomes "18.0").
std::string format_float(double d);

}  // namespace ruleweave
