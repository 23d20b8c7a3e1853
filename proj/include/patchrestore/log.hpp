#pragma once

#include <string>

namespace patchrestore {

/// Writes "patchrestore: warning: <msg>" to stderr unless warnings are muted.
void log_warning(const std::string& msg);
void set_warnings_muted(bool muted);
/// Number of warnings emitted since start, muted or not.
long warning_count();

}  // namespace patchrestore
