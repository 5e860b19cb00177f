#pragma once

namespace dyno {

/// Command-line entry point. Returns 0 on success, 1 on a runtime failure and
/// 2 on a usage error.
int cli_entry(int argc, const char* const* argv);

}  // namespace dyno
