#pragma once

namespace tgs {

/// Process-wide setup for the executables: keeps freed matrix buffers in the
/// heap instead of returning them to the OS (fresh pages are expensive to
/// fault in on some virtualized hosts) and sets the default log level.
void configure_process();

}  // namespace tgs
