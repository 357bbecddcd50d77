#pragma once

namespace rgl {

// Entry point behind the rgl binary; exposed for in-process testing.
// Exit codes: 0 success, 2 validation error, 3 capacity error.
int cli_main(int argc, const char* const* argv);

}  // namespace rgl
