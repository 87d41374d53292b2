#pragma once

#include <cstddef>
#include <functional>

namespace nlsl {

/// Worker count used by library loops; 1 (the default) runs everything inline.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n). Each index should write only its own output slot, so
/// results do not depend on the thread count. The exception from the lowest failing
/// index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nlsl
