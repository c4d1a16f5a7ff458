#pragma once

#include <string>

namespace volbench {

/// Canonical short rendering used in cache paths, tuple keys, and CSV output
/// ("0", "0.25", "1").
std::string format_temperature(double t);

}  // namespace volbench
