#pragma once

#include <string_view>

namespace ulln {

enum class Verdict { holds, violated, outside_regime };

constexpr std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated: return "violated";
        case Verdict::outside_regime: return "outside_regime";
    }
    return "unknown";
}

}  // namespace ulln
