#pragma once

namespace pspin {

// Entry point behind the pspin binary. Exit codes: 0 success, 1 domain
// error (or a failed comparison), 2 usage error.
int cli_main(int argc, const char* const* argv);

} // namespace pspin
