#pragma once

#include <functional>
#include <string_view>

namespace rnmf {

using WarningHandler = std::function<void(std::string_view)>;

// Replaces the process-wide warning sink and returns the previous one.
// The default handler prints "rnmf: warning: <msg>" to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace rnmf
