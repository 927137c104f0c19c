#pragma once

#include <json.hpp>

#include "smscore/baseline.hpp"
#include "smscore/estimate.hpp"
#include "smscore/infer.hpp"
#include "smscore/mc.hpp"

namespace smscore {

// Bumped whenever a field is renamed or removed.
inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const CiReport& ci);
nlohmann::json to_json(const SandwichEstimate& sw);
nlohmann::json to_json(const MaxScoreFit& fit);
nlohmann::json to_json(const McConfig& config);
// Wall time is left out so reports with the same seed compare byte for byte.
nlohmann::json to_json(const McReport& report, bool include_draws = true);

}  // namespace smscore
