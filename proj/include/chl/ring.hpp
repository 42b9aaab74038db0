#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "chl/jump.hpp"
#include "chl/mix.hpp"

namespace chl {

/// 128-bit unsigned, needed because a full point space (2^64 positions)
/// does not fit in a 64-bit accumulator.
using u128 = unsigned __int128;

struct RingConfig {
    BucketCount num_buckets = 1;
    std::uint32_t points_per_bucket = 1;  // replicas per bucket on the circle
    std::uint64_t seed = 0;               // point placement seed
};

namespace detail {

inline void require_ring_config(const RingConfig& config) {
    if (config.num_buckets < 1) {
        throw std::invalid_argument("ring: num_buckets must be >= 1");
    }
    if (config.points_per_bucket < 1) {
        throw std::invalid_argument("ring: points_per_bucket must be >= 1");
    }
}

}  // namespace detail

/// Exact per-bucket ownership of the point space.  owned[b] counts the ring
/// positions whose successor point belongs to bucket b; the counts sum to
/// `space` exactly, with no floating-point drift.
struct ArcFractions {
    std::vector<u128> owned;
    u128 space = 0;

    std::vector<double> fractions() const {
        std::vector<double> out(owned.size());
        for (std::size_t b = 0; b < owned.size(); ++b) {
            out[b] = static_cast<double>(owned[b]) / static_cast<double>(space);
        }
        return out;
    }
};

namespace detail {

// Walks points in position order and credits each point the arc
// (predecessor, self], wrapping through zero.  Points is any range of
// (position, bucket) accessors in sorted order.
template <class Positions, class Buckets>
ArcFractions accumulate_arcs(const Positions& position_of, const Buckets& bucket_of,
                             std::size_t count, BucketCount num_buckets, u128 space) {
    ArcFractions out;
    out.space = space;
    out.owned.assign(static_cast<std::size_t>(num_buckets), 0);
    u128 prev = position_of(count - 1);  // predecessor of the first point, across the wrap
    for (std::size_t i = 0; i < count; ++i) {
        const u128 pos = position_of(i);
        const u128 arc = (i == 0) ? space - prev + pos : pos - prev;
        out.owned[static_cast<std::size_t>(bucket_of(i))] += arc;
        prev = pos;
    }
    return out;
}

}  // namespace detail

/// Karger-style ring, dynamic layout: an ordered map over points that
/// supports inserting and removing one bucket's points at a time.  Points
/// are keyed on (position, bucket, replica) so colliding positions still
/// have a deterministic total order.
class RingA {
public:
    static constexpr std::string_view kName = "ring-a";

    struct Point {
        std::uint64_t position;
        BucketIndex bucket;
        std::uint32_t replica;
        friend constexpr auto operator<=>(const Point&, const Point&) = default;
    };

    RingA() = default;

    static RingA build(const RingConfig& config) {
        detail::require_ring_config(config);
        RingA ring;
        ring.config_ = config;
        for (BucketIndex b = 0; b < config.num_buckets; ++b) {
            ring.insert_points(b);
        }
        return ring;
    }

    /// Bucket of the first point at or clockwise-after `position`,
    /// wrapping to the smallest point past the top of the circle.
    BucketIndex lookup(std::uint64_t position) const {
        if (points_.empty()) {
            throw std::logic_error("ring lookup on empty ring");
        }
        auto it = points_.lower_bound(
            Point{position, std::numeric_limits<BucketIndex>::min(), 0});
        if (it == points_.end()) {
            it = points_.begin();
        }
        return it->second;
    }

    /// Key hashes map straight onto the 64-bit point space.
    BucketIndex bucket_for_key(KeyHash key_hash) const { return lookup(key_hash); }

    /// Inserts the points of the next bucket id; returns that id.
    BucketIndex add_bucket() {
        const BucketIndex b = config_.num_buckets;
        insert_points(b);
        config_.num_buckets = b + 1;
        return b;
    }

    /// Removes exactly the points of bucket b.  Ids are not reassigned.
    void remove_bucket(BucketIndex b) {
        if (b < 0 || b >= config_.num_buckets || !contains_bucket(b)) {
            throw std::invalid_argument("ring: bucket not present");
        }
        if (points_.size() == config_.points_per_bucket) {
            throw std::logic_error("ring: cannot remove the last bucket");
        }
        for (std::uint32_t r = 0; r < config_.points_per_bucket; ++r) {
            points_.erase(Point{point_hash(b, r, config_.seed), b, r});
        }
    }

    bool contains_bucket(BucketIndex b) const {
        return points_.contains(Point{point_hash(b, 0, config_.seed), b, 0});
    }

    ArcFractions arc_fractions() const {
        if (points_.empty()) {
            throw std::logic_error("ring: arc_fractions on empty ring");
        }
        std::vector<std::uint64_t> positions;
        std::vector<BucketIndex> buckets;
        positions.reserve(points_.size());
        buckets.reserve(points_.size());
        for (const auto& [point, bucket] : points_) {
            positions.push_back(point.position);
            buckets.push_back(bucket);
        }
        return detail::accumulate_arcs(
            [&](std::size_t i) { return u128(positions[i]); },
            [&](std::size_t i) { return buckets[i]; }, positions.size(),
            config_.num_buckets, u128(1) << 64);
    }

    const RingConfig& config() const { return config_; }
    std::size_t point_count() const { return points_.size(); }
    /// Number of buckets currently holding points.
    BucketCount bucket_count() const {
        return static_cast<BucketCount>(points_.size() / config_.points_per_bucket);
    }
    const std::map<Point, BucketIndex>& points() const { return points_; }

private:
    void insert_points(BucketIndex b) {
        for (std::uint32_t r = 0; r < config_.points_per_bucket; ++r) {
            const std::uint64_t pos = point_hash(b, r, config_.seed);
            points_.emplace(Point{pos, b, r}, b);
        }
    }

    std::map<Point, BucketIndex> points_;
    RingConfig config_{};
};

/// Karger-style ring, compact layout: a sorted vector of (32-bit truncated
/// position, bucket) pairs, 8 bytes each, looked up by binary search.
/// Immutable after build; changing the bucket set means rebuilding.
class RingB {
public:
    static constexpr std::string_view kName = "ring-b";

    struct Entry {
        std::uint32_t position;
        BucketIndex bucket;
    };

    RingB() = default;

    static RingB build(const RingConfig& config) {
        detail::require_ring_config(config);
        RingB ring;
        ring.config_ = config;
        ring.entries_.reserve(static_cast<std::size_t>(config.num_buckets) *
                              config.points_per_bucket);
        for (BucketIndex b = 0; b < config.num_buckets; ++b) {
            for (std::uint32_t r = 0; r < config.points_per_bucket; ++r) {
                const std::uint64_t full = point_hash(b, r, config.seed);
                ring.entries_.push_back(
                    Entry{static_cast<std::uint32_t>(full >> 32), b});
            }
        }
        std::sort(ring.entries_.begin(), ring.entries_.end(),
                  [](const Entry& a, const Entry& b) {
                      return a.position != b.position ? a.position < b.position
                                                      : a.bucket < b.bucket;
                  });
        return ring;
    }

    BucketIndex lookup(std::uint32_t position) const {
        if (entries_.empty()) {
            throw std::logic_error("ring lookup on empty ring");
        }
        auto it = std::lower_bound(
            entries_.begin(), entries_.end(), position,
            [](const Entry& e, std::uint32_t pos) { return e.position < pos; });
        if (it == entries_.end()) {
            it = entries_.begin();
        }
        return it->bucket;
    }

    /// Keys land on the truncated circle via their high 32 bits.
    BucketIndex bucket_for_key(KeyHash key_hash) const {
        return lookup(static_cast<std::uint32_t>(key_hash >> 32));
    }

    ArcFractions arc_fractions() const {
        if (entries_.empty()) {
            throw std::logic_error("ring: arc_fractions on empty ring");
        }
        return detail::accumulate_arcs(
            [&](std::size_t i) { return u128(entries_[i].position); },
            [&](std::size_t i) { return entries_[i].bucket; }, entries_.size(),
            config_.num_buckets, u128(1) << 32);
    }

    const RingConfig& config() const { return config_; }
    std::size_t point_count() const { return entries_.size(); }
    const std::vector<Entry>& points() const { return entries_; }

private:
    std::vector<Entry> entries_;
    RingConfig config_{};
};

}  // namespace chl
