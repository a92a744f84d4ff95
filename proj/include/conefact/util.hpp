#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace conefact {

/// splitmix64 finalizer; used to derive independent per-item seeds so that
/// parallel work is reproducible regardless of scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t item) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (item + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t item = 0) {
    return std::mt19937_64(mix_seed(seed, item));
}

/// Radical-inverse (Halton) value of `index` in the given prime base.
double halton(std::uint64_t index, int base);

/// Standard normal quantile (Acklam's rational approximation, ~1e-9 abs).
double inverse_normal_cdf(double u);

/// Chunked parallel loop; fn(i) must only write state owned by index i.
/// threads <= 1 runs inline. Results are index-deterministic by design.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

int default_thread_count();

} // namespace conefact
