#pragma once

// Full-rescan oracle for the trigger engine. Independent implementation on
// purpose: a plain in-memory object model, direct recursive evaluation of
// the surface condition AST, and a straightforward interpreter for action
// pipelines. No store, no caching, no woven graphs, no trigger index - after
// every update it scans the whole rule list. Semantics mirror the documented
// contracts: level-triggered firing on the updated (node, attribute) only,
// declaration order, left-AttributeRef anchor, Int/Float comparison
// coercion, evaluation errors recorded per rule without firing, and a
// cascade-depth limit of 64.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ruleweave/metamodel.hpp"
#include "ruleweave/rulelang.hpp"
#include "ruleweave/value.hpp"

namespace testsupport {

struct OracleCascadeOverflow {};

class NaiveEngine {
 public:
  struct Node {
    std::string class_name;
    std::map<std::string, ruleweave::Value> attrs;
    std::map<std::string, std::vector<std::uint64_t>> rels;
  };

  struct Firing {
    std::string rule;
    std::uint64_t node;
    bool operator==(const Firing&) const = default;
  };

  NaiveEngine(const ruleweave::MetaModel& mm, std::vector<ruleweave::RuleDef> rules)
      : mm_(&mm), rules_(std::move(rules)) {
    for (const auto& r : rules_) anchors_.push_back(anchor_of(r.condition));
  }

  std::uint64_t create(const std::string& class_name) {
    nodes_.push_back(Node{class_name, {}, {}});
    return nodes_.size();
  }

  void link(std::uint64_t id, const std::string& rel, std::uint64_t target) {
    const auto* cls = mm_->lookup_class(node(id).class_name);
    const auto* ref = cls->find_reference(rel);
    auto& targets = node_mut(id).rels[rel];
    if (std::find(targets.begin(), targets.end(), target) != targets.end()) return;
    if (!ref->many && !targets.empty())
      targets[0] = target;
    else
      targets.push_back(target);
  }

  /// Plain write with no trigger scan, for populating the model before any
  /// rule exists (mirrors writes against a store with an empty index).
  void set_quiet(std::uint64_t id, const std::string& attr, ruleweave::Value value) {
    node_mut(id).attrs.insert_or_assign(attr, std::move(value));
  }

  void set(std::uint64_t id, const std::string& attr, ruleweave::Value value) {
    node_mut(id).attrs.insert_or_assign(attr, std::move(value));

    std::vector<std::size_t> matching;
    const std::string& cls = node(id).class_name;
    for (std::size_t i = 0; i < rules_.size(); ++i)
      if (anchors_[i].class_path == cls && anchors_[i].attribute == attr) matching.push_back(i);
    if (matching.empty()) return;

    if (depth_ >= 64) throw OracleCascadeOverflow{};
    ++depth_;
    try {
      for (std::size_t i : matching) {
        try {
          if (eval_condition(rules_[i].condition, id)) {
            fired_.push_back({rules_[i].name, id});
            Pipeline p;
            p.frontier = {id};
            run_task(rules_[i].action, p);
          }
        } catch (const EvalFail&) {
          // recorded-and-skipped in the real engine; the oracle only needs
          // to agree that the rule did not fire
        }
      }
    } catch (...) {
      --depth_;
      throw;
    }
    --depth_;
  }

  const std::vector<Firing>& fired() const { return fired_; }
  const Node& node(std::uint64_t id) const { return nodes_.at(id - 1); }
  std::uint64_t node_count() const { return nodes_.size(); }

 private:
  struct EvalFail {};
  struct Pipeline {
    std::vector<std::uint64_t> frontier;
    std::map<std::string, std::vector<std::uint64_t>> vars;
  };

  Node& node_mut(std::uint64_t id) { return nodes_.at(id - 1); }

  static ruleweave::AttributeRef anchor_of(const ruleweave::Condition& c) {
    if (const auto* l = std::get_if<ruleweave::AttributeRef>(&c.left)) return *l;
    return std::get<ruleweave::AttributeRef>(c.right);
  }

  ruleweave::Value term_value(const ruleweave::Term& term, std::uint64_t context) {
    if (const auto* ref = std::get_if<ruleweave::AttributeRef>(&term)) {
      auto it = node(context).attrs.find(ref->attribute);
      if (it == node(context).attrs.end()) throw EvalFail{};  // unset
      return it->second;
    }
    if (const auto* num = std::get_if<ruleweave::NumberLit>(&term))
      return num->is_float ? ruleweave::Value::floating(num->float_value)
                           : ruleweave::Value::integer(num->int_value);
    return ruleweave::Value::string(std::get<ruleweave::StringLit>(term).text);
  }

  bool compare(ruleweave::CompareOp op, const ruleweave::Value& l, const ruleweave::Value& r) {
    using VK = ruleweave::ValueKind;
    using Op = ruleweave::CompareOp;
    auto numeric = [](const ruleweave::Value& v) {
      return v.kind() == VK::Int || v.kind() == VK::Float;
    };
    if (numeric(l) && numeric(r)) {
      if (l.kind() == VK::Int && r.kind() == VK::Int) {
        auto a = l.as_int(), b = r.as_int();
        switch (op) {
          case Op::Eq: return a == b;
          case Op::Neq: return a != b;
          case Op::Gt: return a > b;
          case Op::Gte: return a >= b;
          case Op::Lt: return a < b;
          case Op::Lte: return a <= b;
        }
      }
      double a = l.kind() == VK::Int ? static_cast<double>(l.as_int()) : l.as_float();
      double b = r.kind() == VK::Int ? static_cast<double>(r.as_int()) : r.as_float();
      switch (op) {
        case Op::Eq: return a == b;
        case Op::Neq: return a != b;
        case Op::Gt: return a > b;
        case Op::Gte: return a >= b;
        case Op::Lt: return a < b;
        case Op::Lte: return a <= b;
      }
    }
    if (l.kind() == VK::String && r.kind() == VK::String) {
      if (op == Op::Eq) return l.as_string() == r.as_string();
      if (op == Op::Neq) return l.as_string() != r.as_string();
    }
    throw EvalFail{};
  }

  bool eval_condition(const ruleweave::Condition& c, std::uint64_t context) {
    bool result = compare(c.op, term_value(c.left, context), term_value(c.right, context));
    return c.negated ? !result : result;
  }

  ruleweave::Value parse_literal(const std::string& text, ruleweave::ValueKind want) {
    using VK = ruleweave::ValueKind;
    switch (want) {
      case VK::Bool:
        if (text == "true") return ruleweave::Value::boolean(true);
        if (text == "false") return ruleweave::Value::boolean(false);
        throw EvalFail{};
      case VK::Int: {
        std::int64_t v = 0;
        const char* begin = text.data() + (!text.empty() && text[0] == '+' ? 1 : 0);
        auto res = std::from_chars(begin, text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) throw EvalFail{};
        return ruleweave::Value::integer(v);
      }
      case VK::Float: {
        char* end = nullptr;
        double v = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size()) throw EvalFail{};
        return ruleweave::Value::floating(v);
      }
      case VK::String:
        return ruleweave::Value::string(text);
    }
    throw EvalFail{};
  }

  void run_task(const ruleweave::ActionTask& task, Pipeline& p) {
    for (const auto& call : task.operations) {
      if (call.name == "relation" || call.name == "traverse") {
        const auto& rel = std::get<std::string>(call.args.at(0));
        std::vector<std::uint64_t> next;
        for (auto id : p.frontier) {
          const auto* cls = mm_->lookup_class(node(id).class_name);
          if (!cls || !cls->find_reference(rel)) throw EvalFail{};
          auto it = node(id).rels.find(rel);
          if (it != node(id).rels.end()) next.insert(next.end(), it->second.begin(), it->second.end());
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        p.frontier = std::move(next);
      } else if (call.name == "setAttribute") {
        const auto& attr = std::get<std::string>(call.args.at(0));
        const auto& text = std::get<std::string>(call.args.at(1));
        for (auto id : p.frontier) {
          const auto* cls = mm_->lookup_class(node(id).class_name);
          if (!cls) throw EvalFail{};
          const auto* def = cls->find_attribute(attr);
          if (!def) throw EvalFail{};
          set(id, attr, parse_literal(text, def->value_type));
        }
      } else if (call.name == "filter") {
        const auto& nested = std::get<ruleweave::ActionTask>(call.args.at(0));
        std::vector<std::uint64_t> kept;
        for (auto id : p.frontier) {
          Pipeline inner;
          inner.frontier = {id};
          run_task(nested, inner);
          if (!inner.frontier.empty()) kept.push_back(id);
        }
        p.frontier = std::move(kept);
      } else if (call.name == "ifThen") {
        auto original = p.frontier;
        Pipeline pred;
        pred.frontier = original;
        run_task(std::get<ruleweave::ActionTask>(call.args.at(0)), pred);
        if (!pred.frontier.empty()) {
          Pipeline then;
          then.frontier = original;
          run_task(std::get<ruleweave::ActionTask>(call.args.at(1)), then);
        }
        p.frontier = std::move(original);
      } else if (call.name == "save") {
        p.vars[std::get<std::string>(call.args.at(0))] = p.frontier;
      } else if (call.name == "load") {
        auto it = p.vars.find(std::get<std::string>(call.args.at(0)));
        if (it == p.vars.end()) throw EvalFail{};
        p.frontier = it->second;
      } else {
        throw EvalFail{};  // call() and unknowns are not generated in scenarios
      }
    }
  }

  const ruleweave::MetaModel* mm_;
  std::vector<ruleweave::RuleDef> rules_;
  std::vector<ruleweave::AttributeRef> anchors_;
  std::vector<Node> nodes_;
  std::vector<Firing> fired_;
  int depth_ = 0;
};

}  // namespace testsupport
