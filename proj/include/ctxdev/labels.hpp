#pragma once

#include "ctxdev/errors.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace ctxdev {

/// Context-aware class. The first letter is the non-context label, the
/// second the label after context revision.
enum class AwareLabel {
    d_dc, ///< context-insensitive deviating
    n_dc, ///< context-sensitive deviating
    d_nc, ///< context-sensitive normal
    n_nc, ///< context-insensitive normal
};

inline constexpr std::array<AwareLabel, 4> kAwareLabels{AwareLabel::d_dc, AwareLabel::n_dc, AwareLabel::d_nc, AwareLabel::n_nc};

inline constexpr std::size_t index_of(AwareLabel label) { return static_cast<std::size_t>(label); }

inline std::string_view to_string(AwareLabel label) {
    switch (label) {
    case AwareLabel::d_dc: return "d=>d_c";
    case AwareLabel::n_dc: return "n=>d_c";
    case AwareLabel::d_nc: return "d=>n_c";
    case AwareLabel::n_nc: return "n=>n_c";
    }
    return "?";
}

inline AwareLabel aware_label_from_string(std::string_view text) {
    for (auto label : kAwareLabels)
        if (text == to_string(label)) return label;
    throw ParameterError("unknown context-aware label '" + std::string(text) + "'");
}

inline AwareLabel make_label(bool non_context_deviating, bool context_deviating) {
    if (non_context_deviating) return context_deviating ? AwareLabel::d_dc : AwareLabel::d_nc;
    return context_deviating ? AwareLabel::n_dc : AwareLabel::n_nc;
}

inline bool is_non_context_deviating(AwareLabel l) { return l == AwareLabel::d_dc || l == AwareLabel::d_nc; }
inline bool is_context_deviating(AwareLabel l) { return l == AwareLabel::d_dc || l == AwareLabel::n_dc; }

} // namespace ctxdev
