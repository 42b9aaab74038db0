#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace chl {

/// 64-bit key, pre-hashed by the caller if it is not already an integer.
using KeyHash = std::uint64_t;
/// Bucket id in [0, num_buckets).
using BucketIndex = std::int32_t;
/// Number of buckets; must be >= 1.
using BucketCount = std::int32_t;

/// Multiplier from L'Ecuyer's tables of 64-bit LCGs with good lattice
/// structure; the reference jump hash is defined in terms of it.
inline constexpr std::uint64_t kLcgMultiplier = 2862933555777941757ULL;

/// One step of the 64-bit LCG: state * kLcgMultiplier + 1 (mod 2^64).
constexpr std::uint64_t lcg_next(std::uint64_t state) noexcept {
    return state * kLcgMultiplier + 1;
}

/// Maps an LCG state to a real in (0, 1].  Numerator and denominator are
/// both exactly representable, so the quotient rounds once in binary64.
constexpr double to_unit_interval(std::uint64_t state) noexcept {
    return static_cast<double>((state >> 33) + 1) /
           static_cast<double>(INT64_C(1) << 31);
}

namespace detail {

inline void require_bucket_count(BucketCount num_buckets) {
    if (num_buckets < 1) {
        throw std::invalid_argument("num_buckets must be >= 1");
    }
}

// The next jump destination.  The division happens first and both the
// division and the multiplication round to nearest in binary64; changing
// the association (or letting the compiler contract it) changes buckets,
// and bit-identical buckets across platforms are the whole contract.
inline std::int64_t jump_destination(std::int64_t b, std::uint64_t state) noexcept {
    return static_cast<std::int64_t>(
        static_cast<double>(b + 1) *
        (static_cast<double>(INT64_C(1) << 31) /
         static_cast<double>((state >> 33) + 1)));
}

}  // namespace detail

/// Jump consistent hash: maps a 64-bit key to a bucket in [0, num_buckets)
/// in O(ln n) expected time and no memory beyond a few registers.
/// Bit-exact match for the reference implementation.
inline BucketIndex jump_bucket(KeyHash key, BucketCount num_buckets) {
    detail::require_bucket_count(num_buckets);
    std::uint64_t state = key;
    std::int64_t b = -1;
    std::int64_t j = 0;
    while (j < num_buckets) {
        b = j;
        state = lcg_next(state);
        j = detail::jump_destination(b, state);
    }
    return static_cast<BucketIndex>(b);
}

/// Execution trace of one jump_bucket evaluation.
struct JumpTrace {
    BucketIndex bucket = 0;
    /// Number of while-loop passes; equals destinations.size().
    std::uint32_t iterations = 0;
    /// Successive values taken by b, strictly increasing; the last one is
    /// the returned bucket.
    std::vector<BucketIndex> destinations;
};

/// jump_bucket with the intermediate jump destinations recorded.
inline JumpTrace jump_bucket_traced(KeyHash key, BucketCount num_buckets) {
    detail::require_bucket_count(num_buckets);
    JumpTrace trace;
    std::uint64_t state = key;
    std::int64_t b = -1;
    std::int64_t j = 0;
    while (j < num_buckets) {
        b = j;
        trace.destinations.push_back(static_cast<BucketIndex>(b));
        state = lcg_next(state);
        j = detail::jump_destination(b, state);
    }
    trace.bucket = static_cast<BucketIndex>(b);
    trace.iterations = static_cast<std::uint32_t>(trace.destinations.size());
    return trace;
}

/// Linear-time form of the same mapping: walks every bucket count from 2 to
/// num_buckets and re-draws the jump decision once per step.  It consumes
/// LCG variates on a different schedule than jump_bucket, so the two agree
/// in distribution but not value for value.  Useful as a distributional
/// oracle and for explaining what jump_bucket computes.
inline BucketIndex linear_ch(KeyHash key, BucketCount num_buckets) {
    detail::require_bucket_count(num_buckets);
    std::uint64_t state = key;
    BucketIndex b = 0;
    for (BucketCount j = 1; j < num_buckets; ++j) {
        state = lcg_next(state);
        if (to_unit_interval(state) < 1.0 / (j + 1)) {
            b = j;
        }
    }
    return b;
}

}  // namespace chl
