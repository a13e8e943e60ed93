#pragma once

#include <string>

#include "arise/llm/provider.hpp"

namespace arise::offline {

/// Mock repair model for line-preserving fault injection: each repair request
/// gets the latest script back with the line of the first diagnostic restored
/// from `reference`. One call fixes exactly one diagnosed fault.
llm::MockProvider::Responder line_restore_oracle(std::string reference);

/// Same rule applied directly to a script and its rendered diagnostics.
std::string restore_first_diagnosed_line(const std::string& script, const std::string& rendered_diagnostics,
                                         const std::string& reference);

}  // namespace arise::offline
