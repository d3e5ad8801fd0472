#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "ruleweave/runtime.hpp"
#include "ruleweave/store.hpp"

namespace ruleweave::bench {

/// The smart-building metamodel every benchmark model conforms to.
const MetaModel& building_metamodel();
const char* building_metamodel_text();

struct BenchConfig {
  std::uint64_t model_size = 0;
  std::size_t cache_capacity = 10000;
  std::uint64_t rule_count = 1;       // woven rule instances (throughput runs)
  std::uint64_t condition_size = 3;   // odd node count: 3, 31, 255, ...
  std::uint64_t seed = 0;
  std::string backend_dir;            // empty = in-memory
  std::string report_path;
  std::string csv_path;
  int rounds = 5;                     // measurement rounds (throughput runs)
};

struct MemorySample {
  std::uint64_t op_index = 0;
  std::size_t resident = 0;
  long rss_kb = 0;  // 0 when the platform does not expose it
};

struct BenchReport {
  nlohmann::json config;
  double generate_ms = 0, weave_ms = 0, evaluate_ms = 0;
  std::uint64_t rules_evaluated = 0;
  std::uint64_t rules_fired = 0;
  double throughput_rules_per_s = 0;       // median over rounds
  std::vector<double> round_throughputs;
  std::vector<MemorySample> samples;
  StoreStats stats;
  std::size_t max_resident = 0;
  bool resident_bound_ok = true;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
  std::string samples_csv() const;
};

struct GenerationSummary {
  std::uint64_t rooms = 0;
  std::uint64_t heating_systems = 0;
  std::uint64_t relations = 0;
  std::uint64_t total = 0;
};

/// Deterministic smart-building population: rooms (ids 1..ceil(n/2)) then
/// heating systems, room i linked to heating system i, temperatures drawn
/// uniformly from [10, 30) with one SplitMix64 draw per room in id order.
/// Identical seeds produce byte-identical stores after flush. `progress`,
/// when set, is invoked with the running node count every 1000 creations.
GenerationSummary generate_building(Store& store, std::uint64_t n, std::uint64_t seed,
                                    const std::function<void(std::uint64_t)>& progress = nullptr);

/// Full boolean tree of exactly `size` nodes (odd, >= 3) whose truth value
/// equals the one embedded comparison Ref(attribute) < 18. Padding branches
/// are And nodes over comparisons of equal constants, so larger trees cost
/// more to evaluate without changing the outcome. Size 3 is the plain
/// comparison shape.
ConditionExpr generate_condition_tree(std::uint64_t size, const std::string& attribute,
                                      std::uint64_t seed);

/// Constant-memory run: builds the model, weaves one rule over every room,
/// then sequentially checks all rule conditions, firing the true ones.
/// Asserts resident nodes never exceed the cache capacity.
BenchReport bench_memory(const BenchConfig& cfg);

/// Latency run: weaves cfg.rule_count rule instances (one rule node per
/// room, ascending, wrapping to extra templates when instances exceed
/// rooms), then performs one triggering update per instrumented room per
/// round and reports rules/second (median of cfg.rounds).
BenchReport bench_throughput(const BenchConfig& cfg);

/// Best-effort resident-set size of this process, in kB; 0 if unavailable.
long process_rss_kb();

}  // namespace ruleweave::bench
