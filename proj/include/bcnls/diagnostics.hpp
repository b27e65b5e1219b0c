#pragma once

#include <functional>
#include <string>

namespace bcnls {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a process-wide sink for non-fatal diagnostics; returns the previous one.
/// The default handler writes "warning: ..." to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace bcnls
