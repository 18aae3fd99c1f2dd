#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace quadflux {

// Worker count: min(hardware, QUADFLUX_THREADS) when the variable is set,
// at least 1.
int worker_count();

namespace detail {
void parallel_for_impl(std::size_t n, const std::function<void(std::size_t)>& body);
}

// Runs body(i) for i in [0,n). Bodies must write only to disjoint slots so the
// result is identical for any worker count; reductions stay with the caller.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  detail::parallel_for_impl(n, std::function<void(std::size_t)>(std::forward<F>(body)));
}

}  // namespace quadflux
