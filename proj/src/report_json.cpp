#include "ruleweave/report_json.hpp"

namespace ruleweave {

nlohmann::json to_json(const TriggerReport& report) {
  nlohmann::json fired = nlohmann::json::array();
  for (const auto& f : report.fired) fired.push_back({{"rule", f.rule}, {"node", f.node}});
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : report.errors)
    errors.push_back({{"rule", e.rule}, {"node", e.node}, {"message", e.message}});
  return {{"fired", std::move(fired)},
          {"evaluated", report.evaluated},
          {"errors", std::move(errors)},
          {"cascade_depth", report.cascade_depth}};
}

nlohmann::json to_json(const WeaveReport& report) {
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : report.errors) errors.push_back({{"rule", e.rule}, {"error", e.message}});
  return {{"rules_woven", report.rules_woven},
          {"nodes_created", report.nodes_created},
          {"dictionary_size", report.dictionary_size},
          {"errors", std::move(errors)}};
}

nlohmann::json to_json(const StoreStats& stats) {
  return {{"loads", stats.loads},
          {"evictions", stats.evictions},
          {"writes", stats.writes},
          {"resident_count", stats.resident_count},
          {"max_resident", stats.max_resident},
          {"pinned_count", stats.pinned_count}};
}

}  // namespace ruleweave
