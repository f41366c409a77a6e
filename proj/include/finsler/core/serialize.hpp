#pragma once

#include <json.hpp>

#include "finsler/core/geometry.hpp"

namespace finsler {

constexpr const char* kToolVersion = "0.1.0";

/// Sign and index conventions embedded in every report.
nlohmann::ordered_json convention_ledger();

nlohmann::ordered_json to_json(const TensorField& t);
nlohmann::ordered_json to_json(const ChartPoint& p);
nlohmann::ordered_json to_json(const GeometryBundle& b);

}  // namespace finsler
