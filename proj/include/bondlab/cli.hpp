#pragma once

#include <iosfwd>

namespace bondlab::cli {

// Exit codes: 0 success, 1 usage or configuration error, 2 pipeline
// failure (the manifest then lists the partial artifacts).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bondlab::cli
