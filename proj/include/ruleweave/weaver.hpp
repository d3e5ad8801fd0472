#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ruleweave/rulelang.hpp"
#include "ruleweave/store.hpp"

namespace ruleweave {

/// Condition-graph node taxonomy: three boolean operators, six comparisons,
/// constant values, and reference values (a relation to a data node plus an
/// attribute name).
enum class ConditionNodeKind { And, Or, Not, Eq, Neq, Gt, Gte, Lt, Lte, Const, Ref };

std::string_view kind_tag(ConditionNodeKind kind);
std::optional<ConditionNodeKind> kind_from_tag(std::string_view tag);
bool is_comparison(ConditionNodeKind kind);

/// Graph-level condition tree. Surface conditions lower into this form; the
/// benchmark generator builds larger boolean trees directly since the
/// surface grammar has no boolean combinators.
struct ConditionExpr {
  ConditionNodeKind kind = ConditionNodeKind::Const;
  std::optional<Value> value;  // Const payload
  std::string attribute;       // Ref payload; target is the rule's context node
  std::vector<ConditionExpr> children;

  bool operator==(const ConditionExpr&) const;

  static ConditionExpr constant(Value v);
  static ConditionExpr ref(std::string attribute);
  static ConditionExpr unary(ConditionNodeKind kind, ConditionExpr child);
  static ConditionExpr binary(ConditionNodeKind kind, ConditionExpr left, ConditionExpr right);
};

using ActionId = std::uint32_t;

enum class ActionOp { Relation, SetAttribute, Filter, IfThen, Save, Load, Call };

struct ActionProgram;

struct ActionStep {
  ActionOp op;
  std::vector<std::string> strings;        // literal arguments
  std::vector<ActionProgram> programs;     // nested task arguments
};

struct ActionProgram {
  std::vector<ActionStep> steps;
};

/// Integer-keyed table of compiled action pipelines. Ids are dense from 0
/// in first-compilation order; structurally identical tasks share one id.
class ActionDictionary {
 public:
  ActionId intern(const ActionTask& task);
  const ActionProgram& at(ActionId id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<ActionProgram> entries_;
  std::unordered_map<std::string, ActionId> by_shape_;  // canonical task text
};

/// Validates vocabulary, arity, and argument kinds, then interns the
/// compiled program. Throws Error on unknown operations or bad arguments.
ActionId compile_action(const ActionTask& task, ActionDictionary& dict);

struct RuleTemplate {
  std::string name;
  std::string context_class;
  std::string trigger_attribute;
  ConditionExpr condition;
  ActionId action_id = 0;
  std::uint64_t template_id = 0;  // dense, assigned in weave order
};

/// (class, attribute) -> rules, in declaration order. The behavioral
/// replacement for generated setter overrides: set_attribute consults this
/// map to find exactly the rules a write can affect. Also indexed by class
/// so the node-creation hook can instantiate rules on new nodes.
class TriggerIndex {
 public:
  /// Registers the template unless an identical one is already present;
  /// returns the canonical template id either way.
  std::uint64_t add(RuleTemplate tpl);

  const std::vector<std::uint64_t>* lookup(const std::string& class_name,
                                           const std::string& attribute) const;
  const std::vector<std::uint64_t>* for_class(const std::string& class_name) const;
  const RuleTemplate& at(std::uint64_t template_id) const { return templates_[template_id]; }
  std::size_t size() const { return templates_.size(); }

 private:
  std::vector<RuleTemplate> templates_;
  std::map<std::pair<std::string, std::string>, std::vector<std::uint64_t>> by_key_;
  std::map<std::string, std::vector<std::uint64_t>> by_class_;
};

struct WeaveIssue {
  std::string rule;
  std::string message;
};

struct WeaveReport {
  std::uint64_t rules_woven = 0;
  std::uint64_t nodes_created = 0;
  std::uint64_t dictionary_size = 0;
  std::vector<WeaveIssue> errors;
};

/// Lowers a surface condition against the metamodel: decides the context
/// class and trigger attribute (the left AttributeRef wins when both sides
/// reference attributes), checks declarations, and produces the graph-level
/// tree. Throws Error(NotWeavable / UnknownAttribute / ...) on bad rules.
ConditionExpr lower_condition(const Condition& cond, const MetaModel& mm,
                              std::string& context_class, std::string& trigger_attribute);

/// Materializes the condition tree as store nodes and returns the root id.
/// Ref leaves gain a `target` relation to the context data node.
NodeId build_condition_graph(Store& store, const ConditionExpr& expr, NodeId context);

/// Surface-form variant: validates the condition against the context node's
/// class first.
NodeId build_condition_graph(Store& store, const Condition& cond, NodeId context);

/// Creates the rule node for one (template, data node) pair: action id and
/// name attributes, `condition` and `context` relations, and the "$rules"
/// back-relation on the data node. Idempotent: a second instantiation
/// returns the existing rule node. Throws on context-class mismatch.
NodeId instantiate_rule(Store& store, const RuleTemplate& tpl, NodeId data);

/// Full weave: compiles actions, registers templates, instantiates rule
/// nodes over every existing data node of each rule's context class.
/// Per-rule failures are collected in the report; other rules proceed.
/// Future nodes are covered by the engine's creation hook.
WeaveReport weave(Store& store, const MetaModel& mm, const std::vector<RuleDef>& rules,
                  ActionDictionary& dict, TriggerIndex& index);

}  // namespace ruleweave
