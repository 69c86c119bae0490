#pragma once

#include <cstdlib>
#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace sdv {

/// Frames allocate many multi-megabyte maps. Under glibc, keeps those on the
/// heap instead of paying for a fresh zeroed mapping on every allocation.
inline void keep_large_blocks_on_heap() noexcept {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace sdv
