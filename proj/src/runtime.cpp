#include "ruleweave/runtime.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <utility>

#include "ruleweave/diagnostics.hpp"

namespace ruleweave {

namespace {

void sort_dedupe(std::vector<NodeId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

void dedupe_keep_order(std::vector<NodeId>& ids) {
  std::vector<NodeId> seen;
  std::vector<NodeId> out;
  out.reserve(ids.size());
  for (NodeId id : ids) {
    if (std::find(seen.begin(), seen.end(), id) == seen.end()) {
      seen.push_back(id);
      out.push_back(id);
    }
  }
  ids = std::move(out);
}

Value parse_literal(const std::string& text, ValueKind want) {
  switch (want) {
    case ValueKind::Bool:
      if (text == "true") return Value::boolean(true);
      if (text == "false") return Value::boolean(false);
      throw Error(Errc::EvalError, "cannot parse \"" + text + "\" as Bool");
    case ValueKind::Int: {
      std::int64_t v = 0;
      const char* begin = text.data() + (!text.empty() && text[0] == '+' ? 1 : 0);
      auto res = std::from_chars(begin, text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw Error(Errc::EvalError, "cannot parse \"" + text + "\" as Int");
      return Value::integer(v);
    }
    case ValueKind::Float: {
      char* end = nullptr;
      double v = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size())
        throw Error(Errc::EvalError, "cannot parse \"" + text + "\" as Float");
      return Value::floating(v);
    }
    case ValueKind::String:
      return Value::string(text);
  }
  throw Error(Errc::EvalError, "bad value kind");
}

}  // namespace

Engine::ReportScope::ReportScope(Engine& engine)
    : engine(engine), outermost(engine.report_depth_ == 0) {
  if (outermost) engine.current_ = TriggerReport{};
  ++engine.report_depth_;
}

Engine::ReportScope::~ReportScope() { --engine.report_depth_; }

TriggerReport Engine::ReportScope::take() {
  return outermost ? std::exchange(engine.current_, TriggerReport{}) : TriggerReport{};
}

Engine::Engine(Store& store, const MetaModel& mm) : store_(store), mm_(&mm) {
  store_.set_attribute_hook(
      [this](NodeId node, const std::string& attribute) { return on_attribute_set(node, attribute); });
  store_.set_created_hook(
      [this](NodeId node, const std::string& class_name) { on_node_created(node, class_name); });
}

Engine::~Engine() {
  store_.set_attribute_hook(nullptr);
  store_.set_created_hook(nullptr);
}

WeaveReport Engine::weave(const std::vector<RuleDef>& rules) {
  return ruleweave::weave(store_, *mm_, rules, dict_, index_);
}

WeaveReport Engine::weave_generated(const std::string& name, const std::string& context_class,
                                    const std::string& trigger_attribute, ConditionExpr condition,
                                    const ActionTask& action, std::uint64_t max_instances) {
  WeaveReport report;
  NodeId created_from = store_.next_id();
  NodeId scan_end = store_.next_id();

  ActionId action_id = compile_action(action, dict_);
  RuleTemplate tpl;
  tpl.name = name;
  tpl.context_class = context_class;
  tpl.trigger_attribute = trigger_attribute;
  tpl.condition = std::move(condition);
  tpl.action_id = action_id;
  std::uint64_t tid = index_.add(std::move(tpl));

  std::uint64_t instantiated = 0;
  for (NodeId id = 1; id < scan_end && instantiated < max_instances; ++id) {
    NodeHandle h = store_.resolve(id);
    if (h.class_name != context_class) continue;
    instantiate_rule(store_, index_.at(tid), id);
    ++instantiated;
  }

  report.rules_woven = 1;
  report.nodes_created = store_.next_id() - created_from;
  report.dictionary_size = dict_.size();
  return report;
}

void Engine::on_node_created(NodeId node, const std::string& class_name) {
  const auto* tids = index_.for_class(class_name);
  if (!tids) return;
  for (std::uint64_t tid : *tids) instantiate_rule(store_, index_.at(tid), node);
}

std::optional<NodeId> Engine::find_rule_node(NodeId data, std::uint64_t template_id) {
  for (NodeId rid : store_.get_relation(data, kRulesRelation)) {
    auto tid = store_.get_attribute(rid, "template_id");
    if (tid && tid->kind() == ValueKind::Int &&
        tid->as_int() == static_cast<std::int64_t>(template_id))
      return rid;
  }
  return std::nullopt;
}

NodeId Engine::single_relation(NodeId id, std::string_view name) {
  auto targets = store_.get_relation(id, name);
  if (targets.size() != 1)
    throw Error(Errc::EvalError, "node " + std::to_string(id) + " needs exactly one '" +
                                     std::string(name) + "' target, has " +
                                     std::to_string(targets.size()));
  return targets[0];
}

Value Engine::eval_comparison(ConditionNodeKind kind, const Value& left, const Value& right) {
  auto numeric = [](const Value& v) {
    return v.kind() == ValueKind::Int || v.kind() == ValueKind::Float;
  };
  if (numeric(left) && numeric(right)) {
    if (left.kind() == ValueKind::Int && right.kind() == ValueKind::Int) {
      std::int64_t l = left.as_int(), r = right.as_int();
      switch (kind) {
        case ConditionNodeKind::Eq: return Value::boolean(l == r);
        case ConditionNodeKind::Neq: return Value::boolean(l != r);
        case ConditionNodeKind::Gt: return Value::boolean(l > r);
        case ConditionNodeKind::Gte: return Value::boolean(l >= r);
        case ConditionNodeKind::Lt: return Value::boolean(l < r);
        case ConditionNodeKind::Lte: return Value::boolean(l <= r);
        default: break;
      }
    }
    double l = left.kind() == ValueKind::Int ? static_cast<double>(left.as_int()) : left.as_float();
    double r =
        right.kind() == ValueKind::Int ? static_cast<double>(right.as_int()) : right.as_float();
    switch (kind) {
      case ConditionNodeKind::Eq: return Value::boolean(l == r);
      case ConditionNodeKind::Neq: return Value::boolean(l != r);
      case ConditionNodeKind::Gt: return Value::boolean(l > r);
      case ConditionNodeKind::Gte: return Value::boolean(l >= r);
      case ConditionNodeKind::Lt: return Value::boolean(l < r);
      case ConditionNodeKind::Lte: return Value::boolean(l <= r);
      default: break;
    }
  }
  if (left.kind() == ValueKind::String && right.kind() == ValueKind::String) {
    if (kind == ConditionNodeKind::Eq) return Value::boolean(left.as_string() == right.as_string());
    if (kind == ConditionNodeKind::Neq)
      return Value::boolean(left.as_string() != right.as_string());
    throw Error(Errc::EvalError, "strings compare only with == and !=");
  }
  throw Error(Errc::EvalError, std::string("cannot compare ") + to_string(left.kind()) + " with " +
                                   to_string(right.kind()));
}

Value Engine::eval_node(NodeId id) {
  PinGuard pin(store_, id);
  NodeHandle h = store_.resolve(id);
  auto kind = kind_from_tag(h.class_name);
  if (!kind)
    throw Error(Errc::EvalError, "node " + std::to_string(id) + " (" + h.class_name +
                                     ") is not a condition node");

  switch (*kind) {
    case ConditionNodeKind::Const: {
      auto v = store_.get_attribute(id, "value");
      if (!v) throw Error(Errc::EvalError, "constant node " + std::to_string(id) + " has no value");
      return *v;
    }
    case ConditionNodeKind::Ref: {
      NodeId target = single_relation(id, "target");
      auto name = store_.get_attribute(id, "attribute");
      if (!name || name->kind() != ValueKind::String)
        throw Error(Errc::EvalError, "reference node " + std::to_string(id) + " has no attribute name");
      PinGuard target_pin(store_, target);
      auto v = store_.get_attribute(target, name->as_string());
      if (!v)
        throw Error(Errc::EvalError, "attribute " + name->as_string() + " of node " +
                                         std::to_string(target) + " is unset");
      return *v;
    }
    case ConditionNodeKind::Not: {
      Value v = eval_node(single_relation(id, "left"));
      if (v.kind() != ValueKind::Bool)
        throw Error(Errc::EvalError, "'not' needs a Bool, got " + std::string(to_string(v.kind())));
      return Value::boolean(!v.as_bool());
    }
    case ConditionNodeKind::And:
    case ConditionNodeKind::Or: {
      NodeId left = single_relation(id, "left");
      Value l = eval_node(left);
      if (l.kind() != ValueKind::Bool)
        throw Error(Errc::EvalError, "boolean operator needs Bool operands");
      bool is_and = *kind == ConditionNodeKind::And;
      // short-circuit: the right subtree is never resolved
      if (is_and && !l.as_bool()) return Value::boolean(false);
      if (!is_and && l.as_bool()) return Value::boolean(true);
      Value r = eval_node(single_relation(id, "right"));
      if (r.kind() != ValueKind::Bool)
        throw Error(Errc::EvalError, "boolean operator needs Bool operands");
      return r;
    }
    default: {
      Value l = eval_node(single_relation(id, "left"));
      Value r = eval_node(single_relation(id, "right"));
      return eval_comparison(*kind, l, r);
    }
  }
}

Value Engine::eval_condition(NodeId root) { return eval_node(root); }

void Engine::run_program(const ActionProgram& program, PipelineState& state) {
  for (const ActionStep& step : program.steps) {
    switch (step.op) {
      case ActionOp::Relation: {
        std::vector<NodeId> next;
        for (NodeId id : state.frontier) {
          auto targets = store_.get_relation(id, step.strings[0]);
          next.insert(next.end(), targets.begin(), targets.end());
        }
        sort_dedupe(next);
        state.frontier = std::move(next);
        break;
      }
      case ActionOp::SetAttribute: {
        for (NodeId id : state.frontier) {
          NodeHandle h = store_.resolve(id);
          const ClassDef* cls = store_.metamodel().lookup_class(h.class_name);
          if (!cls)
            throw Error(Errc::EvalError,
                        "setAttribute on non-data node " + std::to_string(id));
          const AttributeDef* attr = cls->find_attribute(step.strings[0]);
          if (!attr)
            throw Error(Errc::UnknownAttribute, h.class_name + "." + step.strings[0]);
          Value v = parse_literal(step.strings[1], attr->value_type);
          store_.set_attribute(id, step.strings[0], std::move(v));  // may cascade
        }
        break;
      }
      case ActionOp::Filter: {
        std::vector<NodeId> kept;
        for (NodeId id : state.frontier) {
          PipelineState nested;
          nested.frontier = {id};
          nested.context = state.context;
          run_program(step.programs[0], nested);
          if (!nested.frontier.empty()) kept.push_back(id);
        }
        state.frontier = std::move(kept);
        break;
      }
      case ActionOp::IfThen: {
        std::vector<NodeId> original = state.frontier;
        PipelineState pred;
        pred.frontier = original;
        pred.context = state.context;
        run_program(step.programs[0], pred);
        if (!pred.frontier.empty()) {
          PipelineState then;
          then.frontier = original;
          then.context = state.context;
          run_program(step.programs[1], then);
        }
        state.frontier = std::move(original);
        break;
      }
      case ActionOp::Save:
        state.variables[step.strings[0]] = state.frontier;
        break;
      case ActionOp::Load: {
        auto it = state.variables.find(step.strings[0]);
        if (it == state.variables.end())
          throw Error(Errc::EvalError, "load of unsaved variable \"" + step.strings[0] + "\"");
        state.frontier = it->second;
        break;
      }
      case ActionOp::Call: {
        auto it = callbacks_.find(step.strings[0]);
        if (it == callbacks_.end())
          throw Error(Errc::UnknownCallback, "\"" + step.strings[0] + "\"");
        state.frontier = it->second(state.frontier, store_);
        dedupe_keep_order(state.frontier);
        break;
      }
    }
  }
}

TriggerReport Engine::execute_action(ActionId action_id, NodeId context) {
  const ActionProgram& program = dict_.at(action_id);
  ReportScope scope(*this);
  PipelineState state;
  state.frontier = {context};
  state.context = context;
  run_program(program, state);
  return scope.take();
}

void Engine::process_rule_node(const std::string& rule_name, NodeId rule_node, NodeId data) {
  PinGuard pin(store_, rule_node);
  ++current_.evaluated;
  try {
    NodeId root = single_relation(rule_node, "condition");
    Value v = eval_node(root);
    if (v.kind() != ValueKind::Bool)
      throw Error(Errc::EvalError, "condition yields " + std::string(to_string(v.kind())) +
                                       ", expected Bool");
    if (!v.as_bool()) return;

    current_.fired.push_back({rule_name, data});
    firing_log_.push_back({rule_name, data});
    auto action = store_.get_attribute(rule_node, "action_id");
    if (!action || action->kind() != ValueKind::Int)
      throw Error(Errc::EvalError, "rule node " + std::to_string(rule_node) + " has no action id");
    const ActionProgram& program = dict_.at(static_cast<ActionId>(action->as_int()));
    PipelineState state;
    state.frontier = {data};
    state.context = data;
    run_program(program, state);
  } catch (const Error& e) {
    if (e.code() == Errc::CascadeDepth) throw;  // aborts the whole outer update
    current_.errors.push_back({rule_name, data, e.what()});
  }
}

TriggerReport Engine::on_attribute_set(NodeId node, const std::string& attribute) {
  ReportScope scope(*this);

  NodeHandle h = store_.resolve(node);
  const auto* tids = index_.lookup(h.class_name, attribute);
  if (!tids || tids->empty()) return scope.take();

  if (depth_ >= kMaxCascadeDepth)
    throw Error(Errc::CascadeDepth, "rule cascade reached depth " + std::to_string(depth_ + 1) +
                                        " at node " + std::to_string(node) + "." + attribute);
  ++depth_;
  current_.cascade_depth = std::max(current_.cascade_depth, depth_);
  try {
    PinGuard pin(store_, node);
    for (std::uint64_t tid : *tids) {
      const RuleTemplate& tpl = index_.at(tid);
      auto rule_node = find_rule_node(node, tid);
      if (!rule_node) continue;  // not instantiated on this node
      process_rule_node(tpl.name, *rule_node, node);
    }
  } catch (...) {
    --depth_;
    throw;
  }
  --depth_;
  return scope.take();
}

TriggerReport Engine::check_node_rules(NodeId data) {
  ReportScope scope(*this);
  PinGuard pin(store_, data);
  for (NodeId rid : store_.get_relation(data, kRulesRelation)) {
    auto name = store_.get_attribute(rid, "name");
    process_rule_node(name && name->kind() == ValueKind::String ? name->as_string() : "?", rid,
                      data);
  }
  return scope.take();
}

void Engine::register_callback(const std::string& name, Callback callback) {
  if (callbacks_.count(name)) throw Error(Errc::DuplicateCallback, name);
  callbacks_.emplace(name, std::move(callback));
}

}  // namespace ruleweave
