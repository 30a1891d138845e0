#pragma once

namespace citysim {

inline constexpr double kDaySeconds = 86400.0;

}  // namespace citysim
