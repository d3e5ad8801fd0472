#pragma once

// Randomized scenario machinery shared by the oracle-equivalence unit test
// and the acceptance suite: builds a random model, weaves random (but
// weave-valid) rules, applies random updates through the real engine and
// the naive full-rescan oracle in lockstep, and requires identical firing
// sequences and final model state.

#include <memory>
#include <string>
#include <vector>

#include "ruleweave/diagnostics.hpp"
#include "ruleweave/kv.hpp"
#include "ruleweave/metamodel.hpp"
#include "ruleweave/runtime.hpp"
#include "ruleweave/splitmix64.hpp"
#include "ruleweave/store.hpp"
#include "support/naive_engine.hpp"

namespace testsupport {

inline const char* kSimMetamodel =
    "class sim.A {\n"
    "  att i: Int\n"
    "  att f: Float\n"
    "  att s: String\n"
    "  att b: Bool\n"
    "  rel peers: sim.B *\n"
    "  rel buddy: sim.B\n"
    "}\n"
    "class sim.B {\n"
    "  att i: Int\n"
    "  att s: String\n"
    "  rel back: sim.A\n"
    "}\n";

struct ScenarioSet {
  std::uint64_t node;
  std::string attr;
  ruleweave::Value value;
};

struct Scenario {
  std::vector<std::string> creates;  // class per node, ids 1..n
  struct Link {
    std::uint64_t a;
    std::string rel;
    std::uint64_t b;
  };
  std::vector<Link> links;
  std::vector<ScenarioSet> initial;
  std::vector<ruleweave::RuleDef> rules;
  std::vector<ScenarioSet> updates;
};

inline Scenario make_scenario(std::uint64_t seed) {
  using ruleweave::SplitMix64;
  using ruleweave::Value;
  SplitMix64 rng(seed);
  Scenario sc;

  std::uint64_t n_a = 1 + rng.next_below(200);
  std::uint64_t n_b = 1 + rng.next_below(200);
  for (std::uint64_t i = 0; i < n_a; ++i) sc.creates.push_back("sim.A");
  for (std::uint64_t i = 0; i < n_b; ++i) sc.creates.push_back("sim.B");
  auto rand_a = [&] { return 1 + rng.next_below(n_a); };
  auto rand_b = [&] { return n_a + 1 + rng.next_below(n_b); };

  for (std::uint64_t a = 1; a <= n_a; ++a) {
    if (rng.next_below(10) < 8) sc.links.push_back({a, "buddy", rand_b()});
    std::uint64_t peers = rng.next_below(4);
    for (std::uint64_t k = 0; k < peers; ++k) sc.links.push_back({a, "peers", rand_b()});
  }
  for (std::uint64_t b = n_a + 1; b <= n_a + n_b; ++b)
    if (rng.next_below(10) < 7) sc.links.push_back({b, "back", rand_a()});

  const char* strings[] = {"red", "green", "blue", "on", "off"};
  auto rand_string = [&] { return std::string(strings[rng.next_below(5)]); };
  auto rand_int = [&] { return static_cast<std::int64_t>(rng.next_below(11)) - 5; };
  auto rand_float = [&] { return rng.next_in(-5.0, 5.0); };

  auto rand_value_for = [&](const std::string& cls, const std::string& attr) -> Value {
    if (attr == "i") return Value::integer(rand_int());
    if (attr == "f") return Value::floating(rand_float());
    if (attr == "s") return Value::string(rand_string());
    (void)cls;
    return Value::boolean(rng.next_below(2) == 0);
  };
  auto rand_attr_of = [&](const std::string& cls) -> std::string {
    if (cls == "sim.A") {
      const char* attrs[] = {"i", "f", "s", "b"};
      return attrs[rng.next_below(4)];
    }
    const char* attrs[] = {"i", "s"};
    return attrs[rng.next_below(2)];
  };

  std::uint64_t total = n_a + n_b;
  auto class_of = [&](std::uint64_t id) { return id <= n_a ? "sim.A" : "sim.B"; };

  for (std::uint64_t id = 1; id <= total; ++id) {
    std::string cls = class_of(id);
    for (const std::string& attr : cls == "sim.A" ? std::vector<std::string>{"i", "f", "s", "b"}
                                                  : std::vector<std::string>{"i", "s"}) {
      if (rng.next_below(10) < 8) sc.initial.push_back({id, attr, rand_value_for(cls, attr)});
    }
  }

  // rules
  std::uint64_t n_rules = rng.next_below(25);
  const char* rel_pool[] = {"buddy", "peers", "back"};
  const char* text_pool[] = {"1", "2", "-3", "4.5", "0.5", "on", "off", "true", "false", "red"};
  for (std::uint64_t r = 0; r < n_rules; ++r) {
    ruleweave::RuleDef rule;
    rule.name = "r" + std::to_string(r);
    std::string cls = rng.next_below(10) < 6 ? "sim.A" : "sim.B";
    std::string attr = rand_attr_of(cls);

    ruleweave::Term anchor = ruleweave::AttributeRef{cls, attr};
    ruleweave::Term other;
    std::uint64_t pick = rng.next_below(100);
    if (attr == "s") {
      if (pick < 70)
        other = ruleweave::StringLit{rand_string()};
      else if (pick < 85)
        other = ruleweave::NumberLit{false, rand_int(), 0};  // type-error path
      else
        other = ruleweave::AttributeRef{cls, rand_attr_of(cls)};
    } else if (attr == "b") {
      other = pick < 50 ? ruleweave::Term(ruleweave::NumberLit{false, rand_int(), 0})
                        : ruleweave::Term(ruleweave::AttributeRef{cls, "b"});  // error paths
    } else {
      if (pick < 55)
        other = ruleweave::NumberLit{false, rand_int(), 0};
      else if (pick < 70) {
        double f = rand_float();
        other = ruleweave::NumberLit{true, 0, f};
      } else if (pick < 85)
        other = ruleweave::AttributeRef{cls, rand_attr_of(cls)};
      else
        other = ruleweave::StringLit{rand_string()};  // type-error path
    }

    ruleweave::CompareOp ops[] = {ruleweave::CompareOp::Eq,  ruleweave::CompareOp::Neq,
                                  ruleweave::CompareOp::Gt,  ruleweave::CompareOp::Gte,
                                  ruleweave::CompareOp::Lt,  ruleweave::CompareOp::Lte};
    rule.condition.op = attr == "s" && rng.next_below(10) < 8
                            ? (rng.next_below(2) ? ruleweave::CompareOp::Eq
                                                 : ruleweave::CompareOp::Neq)
                            : ops[rng.next_below(6)];
    rule.condition.negated = rng.next_below(4) == 0;
    // anchor left (always an AttributeRef) or right; a right-side anchor
    // must not face a left AttributeRef of another class
    if (rng.next_below(4) != 0 || std::holds_alternative<ruleweave::AttributeRef>(other)) {
      rule.condition.left = anchor;
      rule.condition.right = other;
    } else {
      rule.condition.left = other;
      rule.condition.right = anchor;
    }

    // action pipeline, 1..3 ops
    std::uint64_t n_ops = 1 + rng.next_below(3);
    bool saved = false;
    for (std::uint64_t o = 0; o < n_ops; ++o) {
      std::uint64_t k = rng.next_below(100);
      ruleweave::OperationCall call;
      if (k < 35) {
        call.name = "setAttribute";
        const char* attrs[] = {"i", "f", "s", "b"};
        call.args.push_back(ruleweave::ActionArg{std::string(attrs[rng.next_below(4)])});
        call.args.push_back(ruleweave::ActionArg{std::string(text_pool[rng.next_below(10)])});
      } else if (k < 65) {
        call.name = rng.next_below(5) ? "relation" : "traverse";
        call.args.push_back(ruleweave::ActionArg{std::string(rel_pool[rng.next_below(3)])});
      } else if (k < 75) {
        call.name = "filter";
        ruleweave::ActionTask nested;
        nested.operations.push_back(
            {"relation", {ruleweave::ActionArg{std::string(rel_pool[rng.next_below(3)])}}});
        call.args.push_back(ruleweave::ActionArg{std::move(nested)});
      } else if (k < 85) {
        call.name = "ifThen";
        ruleweave::ActionTask pred, then;
        pred.operations.push_back(
            {"relation", {ruleweave::ActionArg{std::string(rel_pool[rng.next_below(3)])}}});
        then.operations.push_back({"setAttribute",
                                   {ruleweave::ActionArg{std::string("s")},
                                    ruleweave::ActionArg{std::string(rand_string())}}});
        call.args.push_back(ruleweave::ActionArg{std::move(pred)});
        call.args.push_back(ruleweave::ActionArg{std::move(then)});
      } else if (k < 92 || !saved) {
        call.name = "save";
        call.args.push_back(ruleweave::ActionArg{std::string("v")});
        saved = true;
      } else {
        call.name = "load";
        call.args.push_back(ruleweave::ActionArg{std::string("v")});
      }
      rule.action.operations.push_back(std::move(call));
    }
    sc.rules.push_back(std::move(rule));
  }

  // updates
  std::uint64_t n_updates = 100 + rng.next_below(400);
  for (std::uint64_t u = 0; u < n_updates; ++u) {
    std::uint64_t id = 1 + rng.next_below(total);
    std::string cls = class_of(id);
    std::string attr = rand_attr_of(cls);
    sc.updates.push_back({id, attr, rand_value_for(cls, attr)});
  }
  return sc;
}

struct ScenarioOutcome {
  bool firings_equal = true;
  bool state_equal = true;
  bool aborts_equal = true;
  std::string detail;
};

/// Runs one scenario through both implementations; every mismatch is
/// reported in `detail`.
inline ScenarioOutcome run_scenario(std::uint64_t seed, std::size_t cache_capacity) {
  ScenarioOutcome out;
  Scenario sc = make_scenario(seed);
  ruleweave::MetaModel mm = ruleweave::parse_metamodel(kSimMetamodel);

  auto backend = std::make_shared<ruleweave::MemoryBackend>();
  ruleweave::Store store(backend, cache_capacity, mm);
  ruleweave::Engine engine(store, mm);
  NaiveEngine oracle(mm, sc.rules);

  for (const auto& cls : sc.creates) {
    auto id = store.create_node(cls);
    auto oid = oracle.create(cls);
    if (id != oid) {
      out.detail = "id drift";
      out.state_equal = false;
      return out;
    }
  }
  for (const auto& link : sc.links) {
    store.add_relation(link.a, link.rel, link.b);
    oracle.link(link.a, link.rel, link.b);
  }
  // initial attribute values land before any rule exists, so neither side
  // triggers anything
  for (const auto& set : sc.initial) {
    store.set_attribute(set.node, set.attr, set.value);
    oracle.set_quiet(set.node, set.attr, set.value);
  }

  auto weave_report = engine.weave(sc.rules);
  if (!weave_report.errors.empty()) {
    out.detail = "unexpected weave error: " + weave_report.errors[0].message;
    out.state_equal = false;
    return out;
  }

  bool engine_aborted = false, oracle_aborted = false;
  for (const auto& update : sc.updates) {
    try {
      store.set_attribute(update.node, update.attr, update.value);
    } catch (const ruleweave::Error& e) {
      if (e.code() != ruleweave::Errc::CascadeDepth) throw;
      engine_aborted = true;
    }
    try {
      oracle.set(update.node, update.attr, update.value);
    } catch (const OracleCascadeOverflow&) {
      oracle_aborted = true;
    }
    if (engine_aborted || oracle_aborted) break;
  }
  if (engine_aborted != oracle_aborted) {
    out.aborts_equal = false;
    out.detail = "abort mismatch";
    return out;
  }

  // firing sequences
  const auto& got = engine.firing_log();
  const auto& want = oracle.fired();
  if (got.size() != want.size()) {
    out.firings_equal = false;
    out.detail = "firing count " + std::to_string(got.size()) + " vs " +
                 std::to_string(want.size());
    return out;
  }
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].rule != want[i].rule || got[i].node != want[i].node) {
      out.firings_equal = false;
      out.detail = "firing " + std::to_string(i) + ": " + got[i].rule + "@" +
                   std::to_string(got[i].node) + " vs " + want[i].rule + "@" +
                   std::to_string(want[i].node);
      return out;
    }
  }

  // final model state
  for (std::uint64_t id = 1; id <= oracle.node_count(); ++id) {
    const auto& onode = oracle.node(id);
    const auto* cls = mm.lookup_class(onode.class_name);
    for (const auto& attr : cls->attributes) {
      auto got_v = store.get_attribute(id, attr.name);
      auto it = onode.attrs.find(attr.name);
      bool oracle_has = it != onode.attrs.end();
      if (got_v.has_value() != oracle_has || (oracle_has && *got_v != it->second)) {
        out.state_equal = false;
        out.detail = "attr " + std::to_string(id) + "." + attr.name;
        return out;
      }
    }
    for (const auto& rel : cls->references) {
      auto got_r = store.get_relation(id, rel.name);
      auto it = onode.rels.find(rel.name);
      std::vector<std::uint64_t> want_r = it == onode.rels.end() ? std::vector<std::uint64_t>{}
                                                                 : it->second;
      if (got_r != want_r) {
        out.state_equal = false;
        out.detail = "rel " + std::to_string(id) + "." + rel.name;
        return out;
      }
    }
  }
  return out;
}

}  // namespace testsupport
