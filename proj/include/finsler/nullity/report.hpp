#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "finsler/nullity/bracket.hpp"
#include "finsler/nullity/classify.hpp"
#include "finsler/nullity/identities.hpp"
#include "finsler/nullity/integrability.hpp"
#include "finsler/nullity/kernel.hpp"

namespace finsler::nullity {

nlohmann::ordered_json to_json(const NullityReport& r);
nlohmann::ordered_json to_json(const BracketResult& r);
nlohmann::ordered_json to_json(const IntegrabilityReport& r);
nlohmann::ordered_json to_json(const ClassificationReport& r);
nlohmann::ordered_json to_json(const SuiteReport& r);

/// Columns: point,which,index,singular_value,relative,tolerance,mu
std::string spectra_csv(const std::vector<NullityReport>& reports);

}  // namespace finsler::nullity
