#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "chl/jump.hpp"
#include "chl/mix.hpp"
#include "chl/ring.hpp"

namespace chl {

namespace detail {

/// Worker count for key-parallel reductions: CHL_THREADS when set,
/// otherwise the hardware concurrency.
inline unsigned thread_limit() {
    if (const char* env = std::getenv("CHL_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<unsigned>(std::min(v, 256ul));
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Splits [0, num_keys) into fixed-size chunks and folds chunk_fn over them,
/// merging per-worker states at the end.  States must be mergeable by
/// integer accumulation only: that is what keeps results byte-identical for
/// any worker count and schedule.
template <class State, class ChunkFn, class MergeFn>
State reduce_over_keys(std::uint64_t num_keys, State init, ChunkFn&& chunk_fn,
                       MergeFn&& merge) {
    constexpr std::uint64_t kChunk = std::uint64_t(1) << 20;
    const std::uint64_t chunks = (num_keys + kChunk - 1) / kChunk;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(thread_limit(), chunks));
    if (workers <= 1) {
        chunk_fn(init, 0, num_keys);
        return init;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<State> partials(workers, init);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (;;) {
                    const std::uint64_t begin = next.fetch_add(kChunk);
                    if (begin >= num_keys) break;
                    chunk_fn(partials[t], begin, std::min(begin + kChunk, num_keys));
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& worker : pool) worker.join();
    for (auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
    for (unsigned t = 1; t < workers; ++t) merge(partials[0], partials[t]);
    return partials[0];
}

inline BucketIndex checked_bucket(BucketIndex b, BucketCount n) {
    if (b < 0 || b >= n) {
        throw std::out_of_range("assigner returned a bucket outside [0, n)");
    }
    return b;
}

}  // namespace detail

/// Population sigma/mu of a set of values (the balance metric).
inline double std_error_of(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return std::sqrt(var) / mean;
}

/// Quantile by linear interpolation between order statistics; input sorted.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Empirical 99% band: 0.5% and 99.5% quantiles.  Feed it relative bucket
/// sizes (fraction / mean fraction), pooled across seeds when the bucket
/// count alone is too small to resolve 1% tails.
inline std::pair<double, double> confidence_interval(std::vector<double> relative_sizes) {
    std::sort(relative_sizes.begin(), relative_sizes.end());
    return {quantile_sorted(relative_sizes, 0.005),
            quantile_sorted(relative_sizes, 0.995)};
}

/// n-th harmonic number, summed smallest terms first.
inline double harmonic_number(std::int64_t n) {
    double h = 0.0;
    for (std::int64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return h;
}

/// Key-space balance of one algorithm at a fixed bucket count.
struct BalanceReport {
    std::string algorithm;
    BucketCount num_buckets = 0;
    std::vector<double> fractions;  // per-bucket share, sums to 1
    double std_error = 0.0;         // sigma/mu across buckets
    double ci_low = 1.0;            // 99% band of relative bucket size
    double ci_high = 1.0;
    bool exact = false;     // exact arc accounting vs sampled keys
    std::uint64_t num_keys = 0;  // 0 when exact
    std::uint64_t seed = 0;
};

namespace detail {

inline void finish_balance_stats(BalanceReport& report) {
    report.std_error = std_error_of(report.fractions);
    std::vector<double> relative(report.fractions);
    for (double& v : relative) v *= static_cast<double>(report.num_buckets);
    std::tie(report.ci_low, report.ci_high) = confidence_interval(std::move(relative));
}

}  // namespace detail

/// Balance measured by assigning num_keys seeded pseudorandom keys.
template <class Assign>
BalanceReport sampled_balance(std::string_view algorithm, Assign&& assign,
                              BucketCount num_buckets, std::uint64_t num_keys,
                              std::uint64_t seed) {
    detail::require_bucket_count(num_buckets);
    if (num_keys < static_cast<std::uint64_t>(num_buckets)) {
        throw std::invalid_argument("sampled_balance: num_keys must be >= num_buckets");
    }
    using Counts = std::vector<std::uint64_t>;
    Counts counts = detail::reduce_over_keys(
        num_keys, Counts(static_cast<std::size_t>(num_buckets), 0),
        [&](Counts& c, std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t i = begin; i < end; ++i) {
                const BucketIndex b =
                    detail::checked_bucket(assign(key_at(seed, i)), num_buckets);
                ++c[static_cast<std::size_t>(b)];
            }
        },
        [](Counts& a, const Counts& b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        });
    BalanceReport report;
    report.algorithm = algorithm;
    report.num_buckets = num_buckets;
    report.num_keys = num_keys;
    report.seed = seed;
    report.fractions.resize(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        report.fractions[b] =
            static_cast<double>(counts[b]) / static_cast<double>(num_keys);
    }
    detail::finish_balance_stats(report);
    return report;
}

/// Balance from exact arc accounting; no sampling noise at all.
template <class Ring>
BalanceReport exact_ring_balance(const Ring& ring) {
    const ArcFractions arcs = ring.arc_fractions();
    BalanceReport report;
    report.algorithm = Ring::kName;
    report.num_buckets = ring.config().num_buckets;
    report.fractions = arcs.fractions();
    report.exact = true;
    report.seed = ring.config().seed;
    detail::finish_balance_stats(report);
    return report;
}

/// Key movement between two bucket counts of the same algorithm family.
struct RebalanceReport {
    std::string algorithm;
    BucketCount from_buckets = 0;
    BucketCount to_buckets = 0;
    std::uint64_t num_keys = 0;
    std::uint64_t seed = 0;
    std::uint64_t moved = 0;       // keys whose bucket changed
    std::uint64_t violations = 0;  // moves breaking monotonicity, see rebalance_report
    std::vector<std::uint64_t> source_counts;  // keys per bucket at from_buckets
    std::vector<std::uint64_t> moved_from;     // moved keys per source bucket
    std::vector<std::uint64_t> moved_to;       // moved keys per destination bucket

    double moved_fraction() const {
        return num_keys ? static_cast<double>(moved) / static_cast<double>(num_keys) : 0.0;
    }
    /// Share of all keys donated by each source bucket; sums to moved_fraction.
    std::vector<double> donated_fractions() const {
        std::vector<double> out(moved_from.size(), 0.0);
        for (std::size_t b = 0; b < moved_from.size(); ++b) {
            out[b] = num_keys
                         ? static_cast<double>(moved_from[b]) / static_cast<double>(num_keys)
                         : 0.0;
        }
        return out;
    }
    /// Share of each source bucket's own keys that it donated.
    std::vector<double> donor_loss_rates() const {
        std::vector<double> out(moved_from.size(), 0.0);
        for (std::size_t b = 0; b < moved_from.size(); ++b) {
            out[b] = source_counts[b] ? static_cast<double>(moved_from[b]) /
                                            static_cast<double>(source_counts[b])
                                      : 0.0;
        }
        return out;
    }
    /// Source buckets that donated at least one sampled key.
    std::vector<BucketIndex> donors() const {
        std::vector<BucketIndex> out;
        for (std::size_t b = 0; b < moved_from.size(); ++b) {
            if (moved_from[b] > 0) out.push_back(static_cast<BucketIndex>(b));
        }
        return out;
    }
};

/// Assigns each sampled key under both bucket counts and accounts for every
/// move.  A violation is an unnecessary move: on growth, a moved key landing
/// below from_buckets (not in a new bucket); on shrink, a moved key whose
/// source bucket still exists.  Equal counts are allowed and report zero
/// movement.
template <class AssignFrom, class AssignTo>
RebalanceReport rebalance_report(std::string_view algorithm, AssignFrom&& assign_from,
                                 AssignTo&& assign_to, BucketCount from_buckets,
                                 BucketCount to_buckets, std::uint64_t num_keys,
                                 std::uint64_t seed) {
    detail::require_bucket_count(from_buckets);
    detail::require_bucket_count(to_buckets);
    if (num_keys == 0) {
        throw std::invalid_argument("rebalance_report: num_keys must be >= 1");
    }
    struct Acc {
        std::uint64_t moved = 0;
        std::uint64_t violations = 0;
        std::vector<std::uint64_t> source_counts;
        std::vector<std::uint64_t> moved_from;
        std::vector<std::uint64_t> moved_to;
    };
    Acc init;
    init.source_counts.assign(static_cast<std::size_t>(from_buckets), 0);
    init.moved_from.assign(static_cast<std::size_t>(from_buckets), 0);
    init.moved_to.assign(static_cast<std::size_t>(to_buckets), 0);
    const bool growth = to_buckets > from_buckets;
    Acc acc = detail::reduce_over_keys(
        num_keys, init,
        [&](Acc& a, std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t i = begin; i < end; ++i) {
                const KeyHash key = key_at(seed, i);
                const BucketIndex src =
                    detail::checked_bucket(assign_from(key), from_buckets);
                const BucketIndex dst =
                    detail::checked_bucket(assign_to(key), to_buckets);
                ++a.source_counts[static_cast<std::size_t>(src)];
                if (src == dst) continue;
                ++a.moved;
                ++a.moved_from[static_cast<std::size_t>(src)];
                ++a.moved_to[static_cast<std::size_t>(dst)];
                if (growth ? dst < from_buckets : src < to_buckets) {
                    ++a.violations;
                }
            }
        },
        [](Acc& a, const Acc& b) {
            a.moved += b.moved;
            a.violations += b.violations;
            for (std::size_t i = 0; i < a.source_counts.size(); ++i)
                a.source_counts[i] += b.source_counts[i];
            for (std::size_t i = 0; i < a.moved_from.size(); ++i)
                a.moved_from[i] += b.moved_from[i];
            for (std::size_t i = 0; i < a.moved_to.size(); ++i)
                a.moved_to[i] += b.moved_to[i];
        });
    RebalanceReport report;
    report.algorithm = algorithm;
    report.from_buckets = from_buckets;
    report.to_buckets = to_buckets;
    report.num_keys = num_keys;
    report.seed = seed;
    report.moved = acc.moved;
    report.violations = acc.violations;
    report.source_counts = std::move(acc.source_counts);
    report.moved_from = std::move(acc.moved_from);
    report.moved_to = std::move(acc.moved_to);
    return report;
}

/// Iteration-count statistics of the jump loop.
struct IterationReport {
    BucketCount num_buckets = 0;
    std::uint64_t num_keys = 0;
    std::uint64_t seed = 0;
    double mean_iterations = 0.0;
    std::uint32_t max_iterations = 0;
    double harmonic = 0.0;   // H_n, the analytic expectation
    double log_bound = 0.0;  // ln(n) + 1
    bool within_bound = false;
};

inline IterationReport iteration_stats(BucketCount num_buckets, std::uint64_t num_keys,
                                       std::uint64_t seed) {
    detail::require_bucket_count(num_buckets);
    if (num_keys == 0) {
        throw std::invalid_argument("iteration_stats: num_keys must be >= 1");
    }
    struct Acc {
        std::uint64_t total = 0;
        std::uint32_t max = 0;
    };
    const Acc acc = detail::reduce_over_keys(
        num_keys, Acc{},
        [&](Acc& a, std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t i = begin; i < end; ++i) {
                const JumpTrace trace = jump_bucket_traced(key_at(seed, i), num_buckets);
                a.total += trace.iterations;
                a.max = std::max(a.max, trace.iterations);
            }
        },
        [](Acc& a, const Acc& b) {
            a.total += b.total;
            a.max = std::max(a.max, b.max);
        });
    IterationReport report;
    report.num_buckets = num_buckets;
    report.num_keys = num_keys;
    report.seed = seed;
    report.mean_iterations =
        static_cast<double>(acc.total) / static_cast<double>(num_keys);
    report.max_iterations = acc.max;
    report.harmonic = harmonic_number(num_buckets);
    report.log_bound = std::log(static_cast<double>(num_buckets)) + 1.0;
    report.within_bound = report.mean_iterations < report.log_bound;
    return report;
}

/// Buckets that would lose key space to the next added bucket, from exact
/// arc accounting of the ring before and after the addition.
inline std::vector<BucketIndex> donors_on_add(const RingA& ring) {
    const ArcFractions before = ring.arc_fractions();
    RingA grown = ring;
    grown.add_bucket();
    const ArcFractions after = grown.arc_fractions();
    std::vector<BucketIndex> donors;
    for (std::size_t b = 0; b < before.owned.size(); ++b) {
        if (after.owned[b] < before.owned[b]) {
            donors.push_back(static_cast<BucketIndex>(b));
        }
    }
    return donors;
}

}  // namespace chl
