#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace laxhopf {

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// visited exactly once; callers write results into per-index slots.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

// Worker count from LAXHOPF_THREADS, defaulting to 1.
std::size_t threads_from_env();

// SplitMix64 finalizer; derives independent stream seeds from a base seed
// and a tag so that results do not depend on evaluation order.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag);
std::uint64_t hash_double(double v);

}  // namespace laxhopf
