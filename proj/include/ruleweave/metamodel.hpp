#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ruleweave/value.hpp"

namespace ruleweave {

struct AttributeDef {
  std::string name;
  ValueKind value_type;
};

struct ReferenceDef {
  std::string name;
  std::string target_class;
  bool many = false;
};

/// One data class: a qualified name plus typed attributes and references.
/// Member names are unique within the class and disjoint across both lists.
struct ClassDef {
  std::string qualified_name;
  std::vector<AttributeDef> attributes;
  std::vector<ReferenceDef> references;

  const AttributeDef* find_attribute(std::string_view name) const;
  const ReferenceDef* find_reference(std::string_view name) const;
};

/// Parsed data-structure definition. Immutable after construction; safe to
/// share across readers.
class MetaModel {
 public:
  MetaModel() = default;
  explicit MetaModel(std::vector<ClassDef> classes);

  const std::vector<ClassDef>& classes() const { return classes_; }

  /// Case-sensitive lookup by qualified name; nullptr when absent.
  const ClassDef* lookup_class(std::string_view qualified_name) const;

 private:
  std::vector<ClassDef> classes_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parses the `.mm` syntax:
///   class <qname> { att <name>: <Type>  rel <name>: <qname> [*] }
/// `#` starts a line comment. Types are Bool, Int, Float, String; `*` marks a
/// multi-valued reference. Throws Error with line/column on bad input,
/// duplicate names, or unresolved reference targets.
MetaModel parse_metamodel(std::string_view text);

/// Canonical text form; parse_metamodel(pretty_print_metamodel(m)) is
/// structurally identical to m.
std::string pretty_print_metamodel(const MetaModel& mm);

}  // namespace ruleweave
