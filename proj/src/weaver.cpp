#include "ruleweave/weaver.hpp"

#include <algorithm>

#include "ruleweave/diagnostics.hpp"

namespace ruleweave {

std::string_view kind_tag(ConditionNodeKind kind) {
  switch (kind) {
    case ConditionNodeKind::And: return kind::And;
    case ConditionNodeKind::Or: return kind::Or;
    case ConditionNodeKind::Not: return kind::Not;
    case ConditionNodeKind::Eq: return kind::Eq;
    case ConditionNodeKind::Neq: return kind::Neq;
    case ConditionNodeKind::Gt: return kind::Gt;
    case ConditionNodeKind::Gte: return kind::Gte;
    case ConditionNodeKind::Lt: return kind::Lt;
    case ConditionNodeKind::Lte: return kind::Lte;
    case ConditionNodeKind::Const: return kind::Const;
    case ConditionNodeKind::Ref: return kind::Ref;
  }
  return {};
}

std::optional<ConditionNodeKind> kind_from_tag(std::string_view tag) {
  if (tag == kind::And) return ConditionNodeKind::And;
  if (tag == kind::Or) return ConditionNodeKind::Or;
  if (tag == kind::Not) return ConditionNodeKind::Not;
  if (tag == kind::Eq) return ConditionNodeKind::Eq;
  if (tag == kind::Neq) return ConditionNodeKind::Neq;
  if (tag == kind::Gt) return ConditionNodeKind::Gt;
  if (tag == kind::Gte) return ConditionNodeKind::Gte;
  if (tag == kind::Lt) return ConditionNodeKind::Lt;
  if (tag == kind::Lte) return ConditionNodeKind::Lte;
  if (tag == kind::Const) return ConditionNodeKind::Const;
  if (tag == kind::Ref) return ConditionNodeKind::Ref;
  return std::nullopt;
}

bool is_comparison(ConditionNodeKind kind) {
  switch (kind) {
    case ConditionNodeKind::Eq:
    case ConditionNodeKind::Neq:
    case ConditionNodeKind::Gt:
    case ConditionNodeKind::Gte:
    case ConditionNodeKind::Lt:
    case ConditionNodeKind::Lte:
      return true;
    default:
      return false;
  }
}

bool ConditionExpr::operator==(const ConditionExpr& o) const {
  return kind == o.kind && value == o.value && attribute == o.attribute && children == o.children;
}

ConditionExpr ConditionExpr::constant(Value v) {
  ConditionExpr e;
  e.kind = ConditionNodeKind::Const;
  e.value = std::move(v);
  return e;
}

ConditionExpr ConditionExpr::ref(std::string attribute) {
  ConditionExpr e;
  e.kind = ConditionNodeKind::Ref;
  e.attribute = std::move(attribute);
  return e;
}

ConditionExpr ConditionExpr::unary(ConditionNodeKind kind, ConditionExpr child) {
  ConditionExpr e;
  e.kind = kind;
  e.children.push_back(std::move(child));
  return e;
}

ConditionExpr ConditionExpr::binary(ConditionNodeKind kind, ConditionExpr left,
                                    ConditionExpr right) {
  ConditionExpr e;
  e.kind = kind;
  e.children.push_back(std::move(left));
  e.children.push_back(std::move(right));
  return e;
}

namespace {

ConditionNodeKind kind_from_op(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return ConditionNodeKind::Eq;
    case CompareOp::Neq: return ConditionNodeKind::Neq;
    case CompareOp::Gt: return ConditionNodeKind::Gt;
    case CompareOp::Gte: return ConditionNodeKind::Gte;
    case CompareOp::Lt: return ConditionNodeKind::Lt;
    case CompareOp::Lte: return ConditionNodeKind::Lte;
  }
  return ConditionNodeKind::Eq;
}

Value value_from_lit(const NumberLit& n) {
  return n.is_float ? Value::floating(n.float_value) : Value::integer(n.int_value);
}

struct OpSignature {
  ActionOp op;
  int string_args;
  int task_args;
};

std::optional<OpSignature> op_signature(const std::string& name) {
  if (name == "relation" || name == "traverse") return OpSignature{ActionOp::Relation, 1, 0};
  if (name == "setAttribute") return OpSignature{ActionOp::SetAttribute, 2, 0};
  if (name == "filter") return OpSignature{ActionOp::Filter, 0, 1};
  if (name == "ifThen") return OpSignature{ActionOp::IfThen, 0, 2};
  if (name == "save") return OpSignature{ActionOp::Save, 1, 0};
  if (name == "load") return OpSignature{ActionOp::Load, 1, 0};
  if (name == "call") return OpSignature{ActionOp::Call, 1, 0};
  return std::nullopt;
}

ActionProgram compile_program(const ActionTask& task) {
  ActionProgram program;
  for (const auto& call : task.operations) {
    auto sig = op_signature(call.name);
    if (!sig) throw Error(Errc::UnknownOperation, call.name);
    std::size_t want = static_cast<std::size_t>(sig->string_args + sig->task_args);
    if (call.args.size() != want)
      throw Error(Errc::ArityMismatch, call.name + " takes " + std::to_string(want) +
                                           " argument(s), got " + std::to_string(call.args.size()));
    ActionStep step;
    step.op = sig->op;
    // string args first, then task args, matching every vocabulary entry
    for (int i = 0; i < sig->string_args; ++i) {
      const auto* s = std::get_if<std::string>(&call.args[i]);
      if (!s) throw Error(Errc::ArgKind, call.name + " argument " + std::to_string(i + 1) +
                                             " must be a string");
      step.strings.push_back(*s);
    }
    for (int i = 0; i < sig->task_args; ++i) {
      const auto* t = std::get_if<ActionTask>(&call.args[sig->string_args + i]);
      if (!t) throw Error(Errc::ArgKind, call.name + " argument " +
                                             std::to_string(sig->string_args + i + 1) +
                                             " must be a { task }");
      step.programs.push_back(compile_program(*t));
    }
    program.steps.push_back(std::move(step));
  }
  return program;
}

}  // namespace

ActionId ActionDictionary::intern(const ActionTask& task) {
  std::string shape = print_task(task);
  auto it = by_shape_.find(shape);
  if (it != by_shape_.end()) return it->second;
  ActionProgram program = compile_program(task);
  ActionId id = static_cast<ActionId>(entries_.size());
  entries_.push_back(std::move(program));
  by_shape_.emplace(std::move(shape), id);
  return id;
}

const ActionProgram& ActionDictionary::at(ActionId id) const {
  if (id >= entries_.size()) throw Error(Errc::UnknownAction, std::to_string(id));
  return entries_[id];
}

ActionId compile_action(const ActionTask& task, ActionDictionary& dict) {
  if (task.operations.empty()) throw Error(Errc::ArityMismatch, "empty action task");
  return dict.intern(task);
}

std::uint64_t TriggerIndex::add(RuleTemplate tpl) {
  for (const auto& existing : templates_) {
    if (existing.name == tpl.name && existing.context_class == tpl.context_class &&
        existing.trigger_attribute == tpl.trigger_attribute &&
        existing.condition == tpl.condition && existing.action_id == tpl.action_id)
      return existing.template_id;
  }
  std::uint64_t id = templates_.size();
  tpl.template_id = id;
  by_key_[{tpl.context_class, tpl.trigger_attribute}].push_back(id);
  by_class_[tpl.context_class].push_back(id);
  templates_.push_back(std::move(tpl));
  return id;
}

const std::vector<std::uint64_t>* TriggerIndex::lookup(const std::string& class_name,
                                                       const std::string& attribute) const {
  auto it = by_key_.find({class_name, attribute});
  return it == by_key_.end() ? nullptr : &it->second;
}

const std::vector<std::uint64_t>* TriggerIndex::for_class(const std::string& class_name) const {
  auto it = by_class_.find(class_name);
  return it == by_class_.end() ? nullptr : &it->second;
}

ConditionExpr lower_condition(const Condition& cond, const MetaModel& mm,
                              std::string& context_class, std::string& trigger_attribute) {
  const auto* lref = std::get_if<AttributeRef>(&cond.left);
  const auto* rref = std::get_if<AttributeRef>(&cond.right);
  if (!lref && !rref)
    throw Error(Errc::NotWeavable, "condition references no attribute");
  if (lref && rref && lref->class_path != rref->class_path)
    throw Error(Errc::NotWeavable, "condition spans two classes (" + lref->class_path + ", " +
                                       rref->class_path + "); single-attribute rules only");

  const AttributeRef& anchor = lref ? *lref : *rref;
  const ClassDef* cls = mm.lookup_class(anchor.class_path);
  if (!cls) throw Error(Errc::UnknownClass, anchor.class_path);

  auto lower_term = [&](const Term& term) -> ConditionExpr {
    if (const auto* ref = std::get_if<AttributeRef>(&term)) {
      if (!cls->find_attribute(ref->attribute))
        throw Error(Errc::UnknownAttribute, ref->class_path + "." + ref->attribute);
      return ConditionExpr::ref(ref->attribute);
    }
    if (const auto* num = std::get_if<NumberLit>(&term))
      return ConditionExpr::constant(value_from_lit(*num));
    return ConditionExpr::constant(Value::string(std::get<StringLit>(term).text));
  };

  context_class = cls->qualified_name;
  trigger_attribute = anchor.attribute;

  ConditionExpr cmp = ConditionExpr::binary(kind_from_op(cond.op), lower_term(cond.left),
                                            lower_term(cond.right));
  if (cond.negated) return ConditionExpr::unary(ConditionNodeKind::Not, std::move(cmp));
  return cmp;
}

NodeId build_condition_graph(Store& store, const ConditionExpr& expr, NodeId context) {
  // children first, so relations always point at existing nodes
  std::vector<NodeId> child_ids;
  child_ids.reserve(expr.children.size());
  for (const auto& child : expr.children) child_ids.push_back(build_condition_graph(store, child, context));

  NodeId id = store.create_node(kind_tag(expr.kind));
  switch (expr.kind) {
    case ConditionNodeKind::Const:
      store.set_attribute(id, "value", *expr.value);
      break;
    case ConditionNodeKind::Ref:
      store.set_attribute(id, "attribute", Value::string(expr.attribute));
      store.add_relation(id, "target", context);
      break;
    case ConditionNodeKind::Not:
      store.add_relation(id, "left", child_ids.at(0));
      break;
    default:
      store.add_relation(id, "left", child_ids.at(0));
      store.add_relation(id, "right", child_ids.at(1));
      break;
  }
  return id;
}

NodeId build_condition_graph(Store& store, const Condition& cond, NodeId context) {
  std::string context_class, trigger_attribute;
  ConditionExpr expr = lower_condition(cond, store.metamodel(), context_class, trigger_attribute);
  NodeHandle h = store.resolve(context);
  if (h.class_name != context_class)
    throw Error(Errc::ClassMismatch,
                "condition is over " + context_class + ", node " + std::to_string(context) +
                    " is " + h.class_name);
  return build_condition_graph(store, expr, context);
}

NodeId instantiate_rule(Store& store, const RuleTemplate& tpl, NodeId data) {
  NodeHandle h = store.resolve(data);
  if (h.class_name != tpl.context_class)
    throw Error(Errc::ClassMismatch, "rule '" + tpl.name + "' guards " + tpl.context_class +
                                         ", node " + std::to_string(data) + " is " + h.class_name);

  for (NodeId rid : store.get_relation(data, kRulesRelation)) {
    auto tid = store.get_attribute(rid, "template_id");
    if (tid && tid->kind() == ValueKind::Int &&
        tid->as_int() == static_cast<std::int64_t>(tpl.template_id))
      return rid;  // already instantiated
  }

  NodeId root = build_condition_graph(store, tpl.condition, data);
  NodeId rule = store.create_node(kind::Rule);
  store.set_attribute(rule, "name", Value::string(tpl.name));
  store.set_attribute(rule, "action_id", Value::integer(tpl.action_id));
  store.set_attribute(rule, "template_id", Value::integer(static_cast<std::int64_t>(tpl.template_id)));
  store.add_relation(rule, "condition", root);
  store.add_relation(rule, "context", data);
  store.add_relation(data, kRulesRelation, rule);
  return rule;
}

WeaveReport weave(Store& store, const MetaModel& mm, const std::vector<RuleDef>& rules,
                  ActionDictionary& dict, TriggerIndex& index) {
  WeaveReport report;
  NodeId created_from = store.next_id();
  // New nodes woven below must not be rescanned as weave targets.
  NodeId scan_end = store.next_id();

  for (const auto& rule : rules) {
    try {
      std::string context_class, trigger_attribute;
      ConditionExpr expr = lower_condition(rule.condition, mm, context_class, trigger_attribute);
      ActionId action = compile_action(rule.action, dict);

      RuleTemplate tpl;
      tpl.name = rule.name;
      tpl.context_class = context_class;
      tpl.trigger_attribute = trigger_attribute;
      tpl.condition = std::move(expr);
      tpl.action_id = action;
      std::uint64_t tid = index.add(std::move(tpl));
      const RuleTemplate& canonical = index.at(tid);

      for (NodeId id = 1; id < scan_end; ++id) {
        NodeHandle h = store.resolve(id);
        if (h.class_name == canonical.context_class) instantiate_rule(store, canonical, id);
      }
      ++report.rules_woven;
    } catch (const Error& e) {
      report.errors.push_back({rule.name, e.what()});
    }
  }

  report.nodes_created = store.next_id() - created_from;
  report.dictionary_size = dict.size();
  return report;
}

}  // namespace ruleweave
