#pragma once

#include <stdexcept>
#include <string>

namespace resp {

// Bad user input: unknown keys, out-of-range values, malformed flags. Exit code 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required upstream artifact is missing (e.g. evolve before pretrain). Exit code 2.
struct dependency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File format violations: bad magic, version mismatch, truncation. Exit code 3.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace resp
