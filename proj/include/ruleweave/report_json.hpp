#pragma once

#include <json.hpp>

#include "ruleweave/store.hpp"
#include "ruleweave/trigger_report.hpp"
#include "ruleweave/weaver.hpp"

namespace ruleweave {

nlohmann::json to_json(const TriggerReport& report);
nlohmann::json to_json(const WeaveReport& report);
nlohmann::json to_json(const StoreStats& stats);

}  // namespace ruleweave
