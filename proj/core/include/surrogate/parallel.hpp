#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace surrogate {

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a stream index.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Worker count: SURROGATE_THREADS if set and positive, otherwise hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
/// visited exactly once; callers must make body(i) independent of scheduling.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace surrogate
