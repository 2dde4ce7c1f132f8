#pragma once

#include <string>

namespace nlode::detail {

/// Shortest decimal string that parses back to exactly the same
/// double. Locale independent.
[[nodiscard]] std::string format_double(double v);

}  // namespace nlode::detail
