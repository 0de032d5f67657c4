#pragma once

#include "json.hpp"
#include "stochpe/state.hpp"

namespace stochpe::detail {

nlohmann::json domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const SpectralState& u);
SpectralState state_from_json(const nlohmann::json& j);

}  // namespace stochpe::detail
