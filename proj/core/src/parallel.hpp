#pragma once

#include <cstddef>
#include <functional>

namespace hawkes::detail {

/// Worker cap: HAWKES_MLE_THREADS if set to a positive integer, otherwise the
/// number of hardware threads (at least 1).
[[nodiscard]] unsigned worker_count();

/// Runs body(chunk) for chunk in [0, num_chunks), spreading chunks over at most
/// worker_count() threads. Chunks are independent; callers reduce per-chunk
/// results in chunk order so the outcome does not depend on the thread count.
void parallel_chunks(std::size_t num_chunks, const std::function<void(std::size_t)>& body);

}  // namespace hawkes::detail
