#pragma once

#include <ostream>

namespace diolab {

/// Entry point of the diolab command line, with injectable streams.
/// Exit codes: 0 ok, 1 usage error, 2 computation failure, 3 partial batch.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace diolab
