#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruleweave/store.hpp"
#include "ruleweave/trigger_report.hpp"
#include "ruleweave/weaver.hpp"

namespace ruleweave {

/// Evaluation-layer value: an attribute read either yields a Value or the
/// unset marker (nullopt). Conditions over unset attributes are evaluation
/// errors, never silently false.
using EvalValue = std::optional<Value>;

/// Pipeline state for one action execution: the traversal frontier (kept
/// duplicate-free, ascending by id, except after `call` which preserves the
/// callback's order) plus named frontier snapshots.
struct PipelineState {
  std::vector<NodeId> frontier;
  std::map<std::string, std::vector<NodeId>> variables;
  NodeId context = 0;
};

inline constexpr int kMaxCascadeDepth = 64;

/// Ties the store, trigger index, and action dictionary together: hooks
/// itself into the store so attribute writes evaluate exactly the rules
/// registered for that (class, attribute) and node creations instantiate
/// the rules guarding the node's class.
class Engine {
 public:
  /// frontier in, frontier out; runs on the caller's thread.
  using Callback = std::function<std::vector<NodeId>(const std::vector<NodeId>&, Store&)>;

  Engine(Store& store, const MetaModel& mm);
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Parses nothing: takes already-parsed rules, compiles and weaves them.
  WeaveReport weave(const std::vector<RuleDef>& rules);

  /// Weaves a programmatically built condition tree (the benchmark path for
  /// trees the surface grammar cannot express). Instantiates rule nodes on
  /// at most max_instances existing context nodes, ascending by id; later
  /// node creations still instantiate via the hook.
  WeaveReport weave_generated(const std::string& name, const std::string& context_class,
                              const std::string& trigger_attribute, ConditionExpr condition,
                              const ActionTask& action,
                              std::uint64_t max_instances = UINT64_MAX);

  /// Post-order interpretation of a condition graph. Ref leaves resolve
  /// their target (loading it if evicted) and read the named attribute;
  /// And/Or short-circuit left to right. Nodes on the recursion path stay
  /// pinned until their subtree finishes. Throws Error(EvalError, ...) on
  /// unset attributes, type mismatches, or malformed graphs.
  Value eval_condition(NodeId root);

  /// Runs a compiled action with frontier = [context]. Mutations go through
  /// set_attribute and may cascade. Returns the report fragment produced by
  /// this execution (complete report when called outside a cascade).
  TriggerReport execute_action(ActionId action_id, NodeId context);

  /// Evaluates every rule node attached to `data`, firing actions whose
  /// conditions hold. This is the sequential full-sweep entry point.
  TriggerReport check_node_rules(NodeId data);

  void register_callback(const std::string& name, Callback callback);

  ActionDictionary& dictionary() { return dict_; }
  TriggerIndex& trigger_index() { return index_; }
  Store& store() { return store_; }

  /// Every firing this engine has produced, in order, across all updates.
  /// Survives cascade aborts, which lose the in-flight report.
  const std::vector<FiredRule>& firing_log() const { return firing_log_; }
  void clear_firing_log() { firing_log_.clear(); }

 private:
  /// Owns `current_` for the outermost engine entry point; nested entries
  /// (cascades, actions run from a sweep) append into the same report.
  struct ReportScope {
    explicit ReportScope(Engine& engine);
    ~ReportScope();
    TriggerReport take();
    Engine& engine;
    bool outermost;
  };

  TriggerReport on_attribute_set(NodeId node, const std::string& attribute);
  void on_node_created(NodeId node, const std::string& class_name);
  void process_rule_node(const std::string& rule_name, NodeId rule_node, NodeId data);
  std::optional<NodeId> find_rule_node(NodeId data, std::uint64_t template_id);
  Value eval_node(NodeId id);
  Value eval_comparison(ConditionNodeKind kind, const Value& left, const Value& right);
  void run_program(const ActionProgram& program, PipelineState& state);
  NodeId single_relation(NodeId id, std::string_view name);

  Store& store_;
  const MetaModel* mm_;
  ActionDictionary dict_;
  TriggerIndex index_;
  std::map<std::string, Callback> callbacks_;
  int depth_ = 0;         // rule-processing cascade depth
  int report_depth_ = 0;  // engine entry nesting, for report ownership
  TriggerReport current_;
  std::vector<FiredRule> firing_log_;
};

}  // namespace ruleweave
