#pragma once

#include <cstdint>

namespace chl {

/// SplitMix64 finalizer: full-avalanche mix of a 64-bit word.  Maps 0 to 0.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

/// Seeded pseudorandom 64-bit stream (SplitMix64).  Used wherever the
/// toolkit draws sample keys; deliberately unrelated to the LCG inside
/// the jump hash so the sampler cannot mask generator artifacts.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += kSplitMixGamma;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

/// i-th value of the stream SplitMix64(seed) without stepping through the
/// previous ones.  key_at(seed, 0) == SplitMix64(seed).next(), which is what
/// makes the key-parallel reductions chunkable.
constexpr std::uint64_t key_at(std::uint64_t seed, std::uint64_t i) noexcept {
    return mix64(seed + (i + 1) * kSplitMixGamma);
}

/// Placement hash shared by the ring and rendezvous baselines: position of
/// replica `replica` of bucket `bucket` under a given seed.  Buckets and
/// replicas are packed into one word so distinct pairs mix to distinct
/// positions (collisions are birthday-bounded at 64 bits).
constexpr std::uint64_t point_hash(std::int32_t bucket, std::uint32_t replica,
                                   std::uint64_t seed) noexcept {
    const std::uint64_t packed =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(bucket)) << 32) | replica;
    return mix64(packed ^ seed);
}

}  // namespace chl
