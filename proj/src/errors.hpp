#pragma once

#include <stdexcept>

namespace hyperradon {

/// File-system failures: missing files, unwritable paths.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data: bad magic bytes, truncated payloads, OFF syntax.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hyperradon
