// Benchmark and utility CLI for the rule-woven model engine.
//
//   bench gen        --size N --seed S --out DIR
//   bench weave      --model DIR --rules F.rules [--mm F.mm] [--cache C]
//   bench memory     --size N --cache C --seed S --report out.json
//   bench throughput --size N --rules R --cond-size K --seed S --report out.json
//
// Exit codes: 0 success, 2 assertion failure (resident bound violated),
// 1 engine error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ruleweave/bench.hpp"
#include "ruleweave/diagnostics.hpp"
#include "ruleweave/report_json.hpp"
#include "ruleweave/rulelang.hpp"
#include "ruleweave/runtime.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ruleweave::Error(ruleweave::Errc::BackendIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ruleweave::Error(ruleweave::Errc::BackendIo, "cannot write " + path);
  out << content;
}

int emit_report(const ruleweave::bench::BenchReport& report, const ruleweave::bench::BenchConfig& cfg) {
  std::string text = report.to_json().dump(2) + "\n";
  if (cfg.report_path.empty())
    std::cout << text;
  else
    write_file(cfg.report_path, text);
  if (!cfg.csv_path.empty()) write_file(cfg.csv_path, report.samples_csv());
  if (!report.resident_bound_ok) {
    std::cerr << "assertion failed: max resident " << report.max_resident << " exceeds capacity\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rule-woven runtime-model engine benchmarks"};
  app.require_subcommand(1);

  ruleweave::bench::BenchConfig cfg;
  std::string out_dir, model_dir, rules_path, mm_path;

  auto* gen = app.add_subcommand("gen", "generate a smart-building model into a file-backed store");
  gen->add_option("--size", cfg.model_size, "node count")->required();
  gen->add_option("--seed", cfg.seed, "PRNG seed");
  gen->add_option("--out", out_dir, "store directory")->required();
  gen->add_option("--cache", cfg.cache_capacity, "cache capacity (nodes)");

  auto* weave = app.add_subcommand("weave", "weave a .rules file into an existing store");
  weave->add_option("--model", model_dir, "store directory")->required();
  weave->add_option("--rules", rules_path, "rules file")->required();
  weave->add_option("--mm", mm_path, "metamodel file (defaults to the built-in building model)");
  weave->add_option("--cache", cfg.cache_capacity, "cache capacity (nodes)");

  auto* memory = app.add_subcommand("memory", "constant-memory run: full sequential rule sweep");
  memory->add_option("--size", cfg.model_size, "node count")->required();
  memory->add_option("--cache", cfg.cache_capacity, "cache capacity (nodes)");
  memory->add_option("--seed", cfg.seed, "PRNG seed");
  memory->add_option("--cond-size", cfg.condition_size, "condition tree size (odd, >= 3)");
  memory->add_option("--report", cfg.report_path, "report JSON path (stdout when omitted)");
  memory->add_option("--csv", cfg.csv_path, "memory samples CSV path");
  memory->add_option("--backend", cfg.backend_dir, "store directory (in-memory when omitted)");

  auto* throughput = app.add_subcommand("throughput", "latency run: one update per rule instance");
  throughput->add_option("--size", cfg.model_size, "node count")->required();
  throughput->add_option("--rules", cfg.rule_count, "rule instances to weave");
  throughput->add_option("--cond-size", cfg.condition_size, "condition tree size (odd, >= 3)");
  throughput->add_option("--seed", cfg.seed, "PRNG seed");
  throughput->add_option("--cache", cfg.cache_capacity, "cache capacity (nodes)");
  throughput->add_option("--rounds", cfg.rounds, "measurement rounds (median reported)");
  throughput->add_option("--report", cfg.report_path, "report JSON path (stdout when omitted)");
  throughput->add_option("--csv", cfg.csv_path, "memory samples CSV path");
  throughput->add_option("--backend", cfg.backend_dir, "store directory (in-memory when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      auto backend = std::make_shared<ruleweave::FileLogBackend>(out_dir);
      ruleweave::Store store(backend, cfg.cache_capacity, ruleweave::bench::building_metamodel());
      auto summary = ruleweave::bench::generate_building(store, cfg.model_size, cfg.seed);
      store.close();
      nlohmann::json j{{"rooms", summary.rooms},
                       {"heating_systems", summary.heating_systems},
                       {"relations", summary.relations},
                       {"total", summary.total},
                       {"out", out_dir}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (weave->parsed()) {
      ruleweave::MetaModel mm = mm_path.empty()
                                    ? ruleweave::parse_metamodel(ruleweave::bench::building_metamodel_text())
                                    : ruleweave::parse_metamodel(read_file(mm_path));
      auto rules = ruleweave::parse_rules(read_file(rules_path));
      auto backend = std::make_shared<ruleweave::FileLogBackend>(model_dir);
      ruleweave::Store store(backend, cfg.cache_capacity, mm);
      ruleweave::Engine engine(store, mm);
      auto report = engine.weave(rules);
      store.close();
      std::cout << ruleweave::to_json(report).dump(2) << "\n";
      return report.errors.empty() ? 0 : 1;
    }
    if (memory->parsed()) {
      auto report = ruleweave::bench::bench_memory(cfg);
      return emit_report(report, cfg);
    }
    auto report = ruleweave::bench::bench_throughput(cfg);
    return emit_report(report, cfg);
  } catch (const ruleweave::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
