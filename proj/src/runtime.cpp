#include "tgs/runtime.hpp"

#include <malloc.h>
#include <spdlog/spdlog.h>

namespace tgs {

void configure_process() {
#ifdef M_MMAP_THRESHOLD
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  spdlog::set_level(spdlog::level::info);
}

}  // namespace tgs
