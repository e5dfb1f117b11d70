#pragma once

// JSON mappings for the engine's records. Field names here are the wire and
// file format; see docs/formats.md.

#include <nlohmann/json.hpp>

#include "irtcat/calibration.hpp"
#include "irtcat/item.hpp"
#include "irtcat/session.hpp"
#include "irtcat/simulator.hpp"

namespace irtcat {

using json = nlohmann::ordered_json;

json to_json(const Item& item);
/// Throws std::invalid_argument naming the offending field. `D` is taken
/// from the bank, not the item object.
Item item_from_json(const json& j, double D);

/// Examinee-facing view of an item: id, stem and options only.
json to_public_json(const Item& item);

json to_json(const TerminationConfig& config);
TerminationConfig termination_config_from_json(const json& j, const TerminationConfig& base = {});

json to_json(const SelectionStrategy& strategy);
SelectionStrategy strategy_from_json(const json& j, const SelectionStrategy& base = {});

json to_json(const KnowledgeReport& report);
json to_json(const ExposureReport& report);
json to_json(const DifficultyEstimation& estimation);
json to_json(const CalibrationReport& report);

/// Full session snapshot including the generator state.
json to_json(const TestSession& session);
/// Throws CorruptedRecordError on any structural problem.
TestSession session_from_json(const json& j);

}  // namespace irtcat
