#pragma once

#include <string>

namespace svelab {

/// Shortest decimal text that parses back to the same double; non-finite
/// values print as inf, -inf and nan.
std::string format_double(double x);

}  // namespace svelab
