// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace volsplat {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (degenerate quaternion,
// mismatched image shapes, out-of-range argument, ...).
struct contract_error : error {
    using error::error;
};

// A file failed structural or value validation. The message names the file
// and, where meaningful, the byte offset of the offending field.
struct format_error : error {
    using error::error;
};

// The operating system refused an open/read/write; distinct from format_error
// so callers can tell "bad path" from "bad bytes".
struct io_error : error {
    using error::error;
};

// A configuration failed validation before any work started.
struct config_error : error {
    using error::error;
};

// Training aborted (non-finite loss, cloud emptied by pruning, ...).
struct training_error : error {
    using error::error;
};

} // namespace volsplat
