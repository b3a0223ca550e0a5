#pragma once

#include <array>
#include <string>
#include <string_view>

namespace cotaudit {

enum class InterventionType { LogicFlip, FactReversal, PremiseNegation, CausalInversion };

inline constexpr std::array<InterventionType, 4> kAllInterventionTypes = {
    InterventionType::LogicFlip, InterventionType::FactReversal, InterventionType::PremiseNegation,
    InterventionType::CausalInversion};

/// "LogicFlip", "FactReversal", "PremiseNegation", "CausalInversion".
std::string_view to_string(InterventionType type) noexcept;
/// "logic_flip", ... as used on the command line and in template file names.
std::string_view to_flag(InterventionType type) noexcept;
/// Accepts either spelling. Throws ConfigError on anything else.
InterventionType parse_intervention_type(std::string_view name);

}  // namespace cotaudit
