#pragma once

#include <string>

#include "stochpe/state.hpp"

namespace stochpe {

inline constexpr int kCheckpointVersion = 1;

/// JSON container: domain, basis ordering tag, time stamp and the raw
/// coefficient array (see docs/formats.md). Doubles are written with enough
/// digits to round-trip exactly.
std::string checkpoint_to_string(const SpectralState& u);
SpectralState checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::string& path, const SpectralState& u);
SpectralState load_checkpoint(const std::string& path);

}  // namespace stochpe
