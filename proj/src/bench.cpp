#include "ruleweave/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>

#include "ruleweave/diagnostics.hpp"
#include "ruleweave/report_json.hpp"
#include "ruleweave/splitmix64.hpp"

namespace ruleweave::bench {

namespace {

constexpr std::uint64_t kSampleEvery = 1000;

// Published throughput figures (rules/s) for condition sizes 3/31/255,
// embedded in reports for comparison only; absolute numbers are
// hardware-specific and never asserted.
const std::pair<int, int> kReferenceThroughput[] = {{3, 70028}, {31, 58788}, {255, 41152}};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

ActionTask heating_action() {
  ActionTask task;
  task.operations.push_back({"relation", {ActionArg{std::string("heatingSystem")}}});
  task.operations.push_back(
      {"setAttribute", {ActionArg{std::string("status")}, ActionArg{std::string("on")}}});
  return task;
}

std::shared_ptr<KvBackend> open_backend(const BenchConfig& cfg) {
  if (cfg.backend_dir.empty()) return std::make_shared<MemoryBackend>();
  return std::make_shared<FileLogBackend>(cfg.backend_dir);
}

nlohmann::json config_json(const BenchConfig& cfg) {
  return {{"model_size", cfg.model_size},
          {"cache_capacity", cfg.cache_capacity},
          {"rule_count", cfg.rule_count},
          {"condition_size", cfg.condition_size},
          {"seed", cfg.seed},
          {"backend", cfg.backend_dir.empty() ? "memory" : cfg.backend_dir},
          {"rounds", cfg.rounds},
          {"sample_every", kSampleEvery}};
}

void take_sample(BenchReport& report, const Store& store, std::uint64_t op_index) {
  report.samples.push_back({op_index, store.stats().resident_count, process_rss_kb()});
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  if (xs.empty()) return 0;
  std::size_t mid = xs.size() / 2;
  return xs.size() % 2 ? xs[mid] : (xs[mid - 1] + xs[mid]) / 2.0;
}

void finish(BenchReport& report, Store& store) {
  report.stats = store.stats();
  report.max_resident = store.stats().max_resident;
  report.resident_bound_ok = report.max_resident <= store.capacity();
}

}  // namespace

long process_rss_kb() {
  std::FILE* f = std::fopen("/proc/self/status", "rb");
  if (!f) return 0;
  char line[256];
  long rss = 0;
  while (std::fgets(line, sizeof line, f)) {
    if (std::strncmp(line, "VmRSS:", 6) == 0) {
      rss = std::strtol(line + 6, nullptr, 10);
      break;
    }
  }
  std::fclose(f);
  return rss;
}

const char* building_metamodel_text() {
  return "class building.Room {\n"
         "  att temperature: Float\n"
         "  rel heatingSystem: building.HeatingSystem\n"
         "}\n"
         "class building.HeatingSystem {\n"
         "  att status: String\n"
         "}\n";
}

const MetaModel& building_metamodel() {
  static const MetaModel mm = parse_metamodel(building_metamodel_text());
  return mm;
}

GenerationSummary generate_building(Store& store, std::uint64_t n, std::uint64_t seed,
                                    const std::function<void(std::uint64_t)>& progress) {
  if (n < 2) throw Error(Errc::Precondition, "model size must be >= 2");
  if (store.next_id() != 1) throw Error(Errc::Precondition, "store is not empty");

  GenerationSummary out;
  out.rooms = (n + 1) / 2;
  out.heating_systems = n / 2;
  out.total = n;

  std::uint64_t created = 0;
  auto tick = [&] {
    ++created;
    if (progress && created % kSampleEvery == 0) progress(created);
  };

  SplitMix64 rng(seed);
  for (std::uint64_t i = 0; i < out.rooms; ++i) {
    NodeId room = store.create_node("building.Room");
    store.set_attribute(room, "temperature", Value::floating(rng.next_in(10.0, 30.0)));
    tick();
  }
  for (std::uint64_t i = 0; i < out.heating_systems; ++i) {
    store.create_node("building.HeatingSystem");
    tick();
  }
  for (std::uint64_t i = 1; i <= out.heating_systems; ++i) {
    store.add_relation(i, "heatingSystem", out.rooms + i);
    ++out.relations;
  }
  return out;
}

ConditionExpr generate_condition_tree(std::uint64_t size, const std::string& attribute,
                                      std::uint64_t seed) {
  if (size < 3 || size % 2 == 0)
    throw Error(Errc::Precondition, "condition size must be odd and >= 3, got " +
                                        std::to_string(size));

  SplitMix64 rng(seed);
  std::vector<ConditionExpr> leaves;

  // Identity padding: true-valued subtrees And-ed around the one real
  // comparison. Each Eq(c, c) unit adds 4 nodes (with its And); the single
  // Const(true) leaf adds 2, absorbing sizes = 1 mod 4.
  std::uint64_t units = (size - 3) / 4;
  if ((size - 3) % 4 == 2) {
    leaves.push_back(ConditionExpr::constant(Value::boolean(true)));
    units = (size - 5) / 4;
  }
  for (std::uint64_t i = 0; i < units; ++i) {
    auto c = static_cast<std::int64_t>(rng.next_below(1000));
    leaves.push_back(ConditionExpr::binary(ConditionNodeKind::Eq,
                                           ConditionExpr::constant(Value::integer(c)),
                                           ConditionExpr::constant(Value::integer(c))));
  }
  // The real comparison goes last so evaluation always walks the whole tree.
  leaves.push_back(ConditionExpr::binary(ConditionNodeKind::Lt, ConditionExpr::ref(attribute),
                                         ConditionExpr::constant(Value::integer(18))));

  // balanced And-merge, preserving leaf order
  std::function<ConditionExpr(std::size_t, std::size_t)> merge = [&](std::size_t lo,
                                                                     std::size_t hi) {
    if (hi - lo == 1) return std::move(leaves[lo]);
    std::size_t mid = lo + (hi - lo) / 2;
    return ConditionExpr::binary(ConditionNodeKind::And, merge(lo, mid), merge(mid, hi));
  };
  return merge(0, leaves.size());
}

BenchReport bench_memory(const BenchConfig& cfg) {
  BenchReport report;
  report.config = config_json(cfg);

  auto backend = open_backend(cfg);
  Store store(backend, cfg.cache_capacity, building_metamodel());
  Engine engine(store, building_metamodel());

  // generate
  auto t0 = Clock::now();
  GenerationSummary gen = generate_building(
      store, cfg.model_size, cfg.seed,
      [&](std::uint64_t created) { take_sample(report, store, created); });
  std::uint64_t rooms = gen.rooms;
  report.generate_ms = ms_since(t0);

  // weave one rule over every room
  t0 = Clock::now();
  engine.weave_generated("bench-rule", "building.Room", "temperature",
                         generate_condition_tree(cfg.condition_size, "temperature", cfg.seed + 1),
                         heating_action());
  report.weave_ms = ms_since(t0);
  take_sample(report, store, rooms);

  // sequentially check all rule conditions, firing the true ones
  t0 = Clock::now();
  for (std::uint64_t room = 1; room <= rooms; ++room) {
    TriggerReport tr = engine.check_node_rules(room);
    report.rules_evaluated += tr.evaluated;
    report.rules_fired += tr.fired.size();
    if (room % kSampleEvery == 0) take_sample(report, store, room);
  }
  report.evaluate_ms = ms_since(t0);
  if (report.evaluate_ms > 0)
    report.throughput_rules_per_s = report.rules_evaluated / (report.evaluate_ms / 1000.0);

  finish(report, store);
  store.close();
  return report;
}

BenchReport bench_throughput(const BenchConfig& cfg) {
  BenchReport report;
  report.config = config_json(cfg);

  auto backend = open_backend(cfg);
  Store store(backend, cfg.cache_capacity, building_metamodel());
  Engine engine(store, building_metamodel());

  auto t0 = Clock::now();
  GenerationSummary gen = generate_building(store, cfg.model_size, cfg.seed);
  report.generate_ms = ms_since(t0);

  // rule_count rule instances: template j covers rooms 1..instances_j
  t0 = Clock::now();
  std::uint64_t templates = cfg.rule_count == 0 ? 0 : (cfg.rule_count + gen.rooms - 1) / gen.rooms;
  std::uint64_t remaining = cfg.rule_count;
  for (std::uint64_t j = 0; j < templates; ++j) {
    std::uint64_t instances = std::min<std::uint64_t>(gen.rooms, remaining);
    engine.weave_generated(
        "bench-rule-" + std::to_string(j), "building.Room", "temperature",
        generate_condition_tree(cfg.condition_size, "temperature", cfg.seed + 1 + j),
        heating_action(), instances);
    remaining -= instances;
  }
  report.weave_ms = ms_since(t0);

  std::uint64_t instrumented = std::min<std::uint64_t>(cfg.rule_count, gen.rooms);
  SplitMix64 update_rng(cfg.seed ^ 0xBE5EED5EEDull);
  t0 = Clock::now();
  for (int round = 0; round < cfg.rounds; ++round) {
    std::uint64_t evaluated = 0, fired = 0;
    auto r0 = Clock::now();
    for (std::uint64_t room = 1; room <= instrumented; ++room) {
      double temp = 10.0 + update_rng.next_unit() * 20.0;
      TriggerReport tr = store.set_attribute(room, "temperature", Value::floating(temp));
      evaluated += tr.evaluated;
      fired += tr.fired.size();
    }
    double secs = ms_since(r0) / 1000.0;
    report.round_throughputs.push_back(secs > 0 ? evaluated / secs : 0.0);
    report.rules_evaluated += evaluated;
    report.rules_fired += fired;
    take_sample(report, store, (round + 1) * instrumented);
  }
  report.evaluate_ms = ms_since(t0);
  report.throughput_rules_per_s = median(report.round_throughputs);
  if (cfg.rule_count == 0) report.throughput_rules_per_s = 0;

  finish(report, store);
  store.close();
  return report;
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json samples_json = nlohmann::json::array();
  for (const auto& s : samples)
    samples_json.push_back({{"op_index", s.op_index}, {"resident", s.resident}, {"rss_kb", s.rss_kb}});
  nlohmann::json reference;
  for (auto [size, rps] : kReferenceThroughput) reference[std::to_string(size)] = rps;
  return {{"config", config},
          {"phase_ms",
           {{"generate", generate_ms}, {"weave", weave_ms}, {"evaluate", evaluate_ms}}},
          {"rules_evaluated", rules_evaluated},
          {"rules_fired", rules_fired},
          {"throughput_rules_per_s", throughput_rules_per_s},
          {"round_throughputs", round_throughputs},
          {"reference_throughput_rules_per_s", reference},
          {"samples", samples_json},
          {"store_stats", ruleweave::to_json(stats)},
          {"max_resident", max_resident},
          {"resident_bound_ok", resident_bound_ok},
          {"notes", notes}};
}

std::string BenchReport::samples_csv() const {
  std::string out = "op_index,resident,rss_kb\n";
  for (const auto& s : samples) {
    out += std::to_string(s.op_index);
    out += ',';
    out += std::to_string(s.resident);
    out += ',';
    out += std::to_string(s.rss_kb);
    out += '\n';
  }
  return out;
}

}  // namespace ruleweave::bench
