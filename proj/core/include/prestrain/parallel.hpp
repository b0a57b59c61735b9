#pragma once

#include <cstddef>
#include <functional>

namespace prestrain {

/// Worker count: PRESTRAIN_LAB_THREADS if set (>= 1), else hardware concurrency.
int thread_count();

/// Runs body(chunk) for chunk in [0, chunks), spread over thread_count() workers.
/// Chunk boundaries are independent of the worker count, so chunked reductions
/// are reproducible. The first exception (lowest chunk) is rethrown.
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& body);

}  // namespace prestrain
