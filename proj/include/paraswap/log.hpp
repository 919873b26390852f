#pragma once

#include <functional>
#include <string>

namespace paraswap::log {

using Sink = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: stderr). Passing an empty function
/// silences warnings.
void set_warning_sink(Sink sink);
void warn(const std::string& message);

}  // namespace paraswap::log
