#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chl/mix.hpp"
#include "chl/ring.hpp"

namespace chl {

namespace detail {

template <class T>
inline void do_not_optimize(const T& value) {
#if defined(__GNUC__) || defined(__clang__)
    asm volatile("" : : "g"(value) : "memory");
#else
    volatile T copy = value;
    (void)copy;
#endif
}

/// Maps a 64-bit random word into [0, n) without division.
inline std::size_t map_to_range(std::uint64_t r, std::size_t n) {
    return static_cast<std::size_t>((u128(r) * n) >> 64);
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return values[values.size() / 2];
}

inline std::string build_environment_tag() {
    std::string env;
#if defined(__x86_64__)
    env = "x86_64";
#elif defined(__aarch64__)
    env = "aarch64";
#else
    env = "unknown-arch";
#endif
#if defined(__VERSION__)
    env += " gcc-compatible ";
    env += __VERSION__;
#endif
    return env;
}

}  // namespace detail

/// One timing measurement; ns_per_op has the loop overhead (key generation,
/// accumulator, and any cache-competition workload) already subtracted.
struct BenchResult {
    std::string algorithm;
    BucketCount num_buckets = 0;
    double ns_per_op = 0.0;
    std::uint64_t iterations = 0;
    bool cache_pressure = false;
    std::string environment;
};

/// Memory workload interleaved with each hash evaluation to mimic a busy
/// server: a few scattered byte reads plus one large contiguous block read.
struct CachePressureConfig {
    std::size_t filler_bytes = std::size_t(256) << 20;  // desk-scale default; flag raises it to 1 GB
    unsigned random_touches = 16;                       // single-byte reads per op
    std::size_t block_bytes = 65536;                    // contiguous bytes read per op
};

namespace detail {

inline std::uint64_t cache_touches(const std::uint8_t* filler, std::size_t size,
                                   const CachePressureConfig& config, std::uint64_t r) {
    std::uint64_t sum = 0;
    for (unsigned t = 0; t < config.random_touches; ++t) {
        r = mix64(r + t + 1);
        sum += filler[map_to_range(r, size)];
    }
    const std::size_t start = map_to_range(mix64(r), size - config.block_bytes + 1);
    const std::uint8_t* block = filler + start;
    std::uint64_t acc = 0;
    for (std::size_t off = 0; off + 8 <= config.block_bytes; off += 8) {
        std::uint64_t word;
        std::memcpy(&word, block + off, 8);
        acc += word;
    }
    return sum + acc;
}

template <class PerOp>
double timed_pass(std::uint64_t iterations, std::uint64_t seed, PerOp&& per_op) {
    SplitMix64 keys(seed);
    std::uint64_t sink = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < iterations; ++i) {
        sink += per_op(keys.next());
    }
    const auto stop = std::chrono::steady_clock::now();
    do_not_optimize(sink);
    return std::chrono::duration<double>(stop - start).count();
}

template <class PerOp>
double median_pass_seconds(std::uint64_t iterations, std::uint64_t seed, PerOp&& per_op) {
    constexpr int kRuns = 5;
    (void)timed_pass(iterations, seed, per_op);  // warmup
    std::vector<double> runs(kRuns);
    for (int r = 0; r < kRuns; ++r) {
        runs[r] = timed_pass(iterations, seed, per_op);
    }
    return median(std::move(runs));
}

}  // namespace detail

/// Times `assign` over a pseudorandom key sequence.  Runs the same loop with
/// and without the assignment (median of 5 passes each, one warmup) and
/// reports the difference per op, floored at zero.  Single-threaded.
template <class Assign>
BenchResult time_assign(std::string_view algorithm, Assign&& assign,
                        BucketCount num_buckets, std::uint64_t iterations,
                        const std::optional<CachePressureConfig>& cache = std::nullopt,
                        std::uint64_t seed = 0x62656e6368ULL) {
    if (iterations == 0) {
        throw std::invalid_argument("time_assign: iterations must be >= 1");
    }
    std::vector<std::uint8_t> filler;
    if (cache) {
        if (cache->filler_bytes < cache->block_bytes) {
            throw std::invalid_argument("time_assign: filler smaller than block read");
        }
        filler.assign(cache->filler_bytes, 1);
    }
    const std::uint8_t* filler_data = filler.data();
    const std::size_t filler_size = filler.size();

    double with_work = 0.0;
    double baseline = 0.0;
    if (cache) {
        const CachePressureConfig cfg = *cache;
        with_work = detail::median_pass_seconds(
            iterations, seed, [&](std::uint64_t key) {
                return detail::cache_touches(filler_data, filler_size, cfg, key) +
                       static_cast<std::uint64_t>(assign(key));
            });
        baseline = detail::median_pass_seconds(
            iterations, seed, [&](std::uint64_t key) {
                return detail::cache_touches(filler_data, filler_size, cfg, key) + key;
            });
    } else {
        with_work = detail::median_pass_seconds(
            iterations, seed,
            [&](std::uint64_t key) { return static_cast<std::uint64_t>(assign(key)); });
        baseline = detail::median_pass_seconds(
            iterations, seed, [](std::uint64_t key) { return key; });
    }

    BenchResult result;
    result.algorithm = algorithm;
    result.num_buckets = num_buckets;
    result.iterations = iterations;
    result.cache_pressure = cache.has_value();
    result.environment = detail::build_environment_tag();
    result.ns_per_op =
        std::max(0.0, (with_work - baseline) / static_cast<double>(iterations) * 1e9);
    return result;
}

enum class RingLayout { A, B };

inline std::string_view layout_name(RingLayout layout) {
    return layout == RingLayout::A ? "ring-a" : "ring-b";
}

/// Wall-clock seconds to build one ring (construction only, teardown excluded).
inline double build_time(RingLayout layout, const RingConfig& config) {
    detail::require_ring_config(config);
    using clock = std::chrono::steady_clock;
    double seconds = 0.0;
    if (layout == RingLayout::A) {
        const auto start = clock::now();
        const RingA ring = RingA::build(config);
        seconds = std::chrono::duration<double>(clock::now() - start).count();
        detail::do_not_optimize(ring.point_count());
    } else {
        const auto start = clock::now();
        const RingB ring = RingB::build(config);
        seconds = std::chrono::duration<double>(clock::now() - start).count();
        detail::do_not_optimize(ring.point_count());
    }
    return seconds;
}

/// Analytic space model of the ring layouts: 48 bytes per point for the
/// tree-map layout, 8 for the packed sorted array.  An accounting model of
/// the canonical node sizes, not a live heap measurement.
struct MemoryModel {
    RingLayout layout = RingLayout::A;
    BucketCount num_buckets = 0;
    std::uint32_t points_per_bucket = 0;
    std::uint64_t bytes_per_point = 0;
    std::uint64_t total_bytes = 0;
};

inline MemoryModel memory_model(RingLayout layout, BucketCount num_buckets,
                                std::uint32_t points_per_bucket) {
    detail::require_ring_config(RingConfig{num_buckets, points_per_bucket, 0});
    MemoryModel model;
    model.layout = layout;
    model.num_buckets = num_buckets;
    model.points_per_bucket = points_per_bucket;
    model.bytes_per_point = layout == RingLayout::A ? 48 : 8;
    model.total_bytes = static_cast<std::uint64_t>(num_buckets) * points_per_bucket *
                        model.bytes_per_point;
    return model;
}

/// Renders a byte count in binary units, promoting to the next unit from
/// 512 upward (so 800,000,000 bytes reads "0.75 GB", not "763 MB").
inline std::string format_bytes(std::uint64_t bytes) {
    static constexpr const char* kUnits[] = {"B", "KB", "MB", "GB", "TB", "PB"};
    double value = static_cast<double>(bytes);
    std::size_t unit = 0;
    while (unit + 1 < std::size(kUnits) && value >= 512.0) {
        value /= 1024.0;
        ++unit;
    }
    char buffer[32];
    if (unit == 0) {
        std::snprintf(buffer, sizeof(buffer), "%.0f B", value);
    } else if (value < 1.0) {
        std::snprintf(buffer, sizeof(buffer), "%.2f %s", value, kUnits[unit]);
    } else if (value < 10.0) {
        std::snprintf(buffer, sizeof(buffer), "%.1f %s", value, kUnits[unit]);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%.0f %s", value, kUnits[unit]);
    }
    return buffer;
}

}  // namespace chl
