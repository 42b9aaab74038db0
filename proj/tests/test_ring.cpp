#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "catch_amalgamated.hpp"
#include "chl/mix.hpp"
#include "chl/ring.hpp"

using namespace chl;

namespace {

// Successor scan over independently recomputed points: smallest
// (position, bucket, replica) at or after the key, wrapping to the global
// minimum.  Mirrors what the ordered structures must return.
BucketIndex oracle_a(const RingConfig& c, std::uint64_t key) {
    using P = std::tuple<std::uint64_t, BucketIndex, std::uint32_t>;
    bool any_at_or_after = false;
    P best{};
    P first{};
    bool seen = false;
    for (BucketIndex b = 0; b < c.num_buckets; ++b) {
        for (std::uint32_t r = 0; r < c.points_per_bucket; ++r) {
            const P p{point_hash(b, r, c.seed), b, r};
            if (!seen || p < first) first = p;
            seen = true;
            if (std::get<0>(p) >= key && (!any_at_or_after || p < best)) {
                best = p;
                any_at_or_after = true;
            }
        }
    }
    return std::get<1>(any_at_or_after ? best : first);
}

BucketIndex oracle_b(const RingConfig& c, std::uint32_t key_hi) {
    using P = std::pair<std::uint32_t, BucketIndex>;
    bool any_at_or_after = false;
    P best{};
    P first{};
    bool seen = false;
    for (BucketIndex b = 0; b < c.num_buckets; ++b) {
        for (std::uint32_t r = 0; r < c.points_per_bucket; ++r) {
            const P p{static_cast<std::uint32_t>(point_hash(b, r, c.seed) >> 32), b};
            if (!seen || p < first) first = p;
            seen = true;
            if (p.first >= key_hi && (!any_at_or_after || p < best)) {
                best = p;
                any_at_or_after = true;
            }
        }
    }
    return (any_at_or_after ? best : first).second;
}

u128 owned_sum(const ArcFractions& arcs) {
    u128 sum = 0;
    for (const u128 v : arcs.owned) sum += v;
    return sum;
}

}  // namespace

TEST_CASE("point placement pins", "[ring]") {
    CHECK(point_hash(0, 0, 0) == 0);
    CHECK(point_hash(1, 0, 0) == 15573649723082471743ULL);
    CHECK(point_hash(0, 1, 0) == 6238072747940578789ULL);
    CHECK(point_hash(3, 7, 0xabcdef) == 1156823409394381887ULL);
}

TEST_CASE("build is sized and deterministic", "[ring]") {
    const RingConfig config{17, 4, 99};
    const RingA a1 = RingA::build(config);
    const RingA a2 = RingA::build(config);
    CHECK(a1.point_count() == 17 * 4);
    CHECK(a1.bucket_count() == 17);
    CHECK(a1.points() == a2.points());

    const RingB b1 = RingB::build(config);
    CHECK(b1.point_count() == 17 * 4);
    const auto& entries = b1.points();
    const bool sorted = std::is_sorted(
        entries.begin(), entries.end(), [](const RingB::Entry& x, const RingB::Entry& y) {
            return std::tie(x.position, x.bucket) < std::tie(y.position, y.bucket);
        });
    CHECK(sorted);
}

TEST_CASE("config and state validation", "[ring]") {
    CHECK_THROWS_AS(RingA::build({0, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(RingA::build({1, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(RingB::build({-3, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(RingA{}.lookup(0), std::logic_error);
    CHECK_THROWS_AS(RingB{}.lookup(0), std::logic_error);
    CHECK_THROWS_AS(RingA{}.arc_fractions(), std::logic_error);
}

TEST_CASE("lookup equals the successor-scan oracle", "[ring]") {
    const RingConfig configs[] = {{1, 1, 0}, {2, 3, 1}, {17, 5, 7}, {100, 20, 3}};
    std::size_t mismatches_a = 0;
    std::size_t mismatches_b = 0;
    for (const RingConfig& config : configs) {
        const RingA a = RingA::build(config);
        const RingB b = RingB::build(config);
        SplitMix64 keys(55);
        for (int i = 0; i < 2000; ++i) {
            const KeyHash key = keys.next();
            if (a.bucket_for_key(key) != oracle_a(config, key)) ++mismatches_a;
            if (b.bucket_for_key(key) !=
                oracle_b(config, static_cast<std::uint32_t>(key >> 32))) {
                ++mismatches_b;
            }
        }
    }
    CHECK(mismatches_a == 0);
    CHECK(mismatches_b == 0);
}

TEST_CASE("a point owns its own position", "[ring]") {
    const RingConfig config{10, 3, 42};
    const RingA ring = RingA::build(config);
    // positions are distinct for this config, so the boundary key maps back
    std::vector<std::uint64_t> positions;
    for (const auto& [point, bucket] : ring.points()) positions.push_back(point.position);
    REQUIRE(std::adjacent_find(positions.begin(), positions.end()) == positions.end());
    std::size_t misses = 0;
    for (BucketIndex b = 0; b < config.num_buckets; ++b) {
        for (std::uint32_t r = 0; r < config.points_per_bucket; ++r) {
            if (ring.lookup(point_hash(b, r, config.seed)) != b) ++misses;
        }
    }
    CHECK(misses == 0);
}

TEST_CASE("keys past the last point wrap to the first", "[ring]") {
    const RingConfig config{5, 2, 123};
    const RingA ring = RingA::build(config);
    const auto first = ring.points().begin()->first;
    const auto last = std::prev(ring.points().end())->first;
    REQUIRE(last.position < 0xffffffffffffffffULL);
    CHECK(ring.lookup(last.position + 1) == first.bucket);
    CHECK(ring.lookup(0xffffffffffffffffULL) == first.bucket);
}

TEST_CASE("add_bucket matches a fresh build", "[ring]") {
    RingA grown = RingA::build({9, 6, 5});
    const BucketIndex added = grown.add_bucket();
    CHECK(added == 9);
    CHECK(grown.config().num_buckets == 10);
    const RingA fresh = RingA::build({10, 6, 5});
    CHECK(grown.points() == fresh.points());
}

TEST_CASE("remove_bucket erases exactly that bucket's points", "[ring]") {
    RingA ring = RingA::build({6, 4, 9});
    ring.remove_bucket(2);
    CHECK(ring.point_count() == 5 * 4);
    CHECK(!ring.contains_bucket(2));
    CHECK(ring.contains_bucket(5));
    SplitMix64 keys(77);
    std::size_t hits = 0;
    for (int i = 0; i < 2000; ++i) {
        if (ring.bucket_for_key(keys.next()) == 2) ++hits;
    }
    CHECK(hits == 0);
    CHECK_THROWS_AS(ring.remove_bucket(2), std::invalid_argument);
    CHECK_THROWS_AS(ring.remove_bucket(17), std::invalid_argument);
    ring.remove_bucket(0);
    ring.remove_bucket(1);
    ring.remove_bucket(3);
    ring.remove_bucket(4);
    CHECK_THROWS_AS(ring.remove_bucket(5), std::logic_error);
    CHECK(ring.lookup(0) == 5);  // sole survivor owns everything
}

TEST_CASE("arc accounting is exact", "[ring]") {
    const RingConfig configs[] = {{1, 1, 0}, {3, 7, 2}, {50, 20, 8}};
    for (const RingConfig& config : configs) {
        const ArcFractions a = RingA::build(config).arc_fractions();
        CHECK(owned_sum(a) == a.space);
        CHECK(a.space == u128(1) << 64);
        const ArcFractions b = RingB::build(config).arc_fractions();
        CHECK(owned_sum(b) == b.space);
        CHECK(b.space == u128(1) << 32);

        double total = 0.0;
        for (const double f : a.fractions()) total += f;
        CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("one point owns the whole circle", "[ring]") {
    const RingA ring = RingA::build({1, 1, 3});
    const ArcFractions arcs = ring.arc_fractions();
    REQUIRE(arcs.owned.size() == 1);
    CHECK(arcs.owned[0] == arcs.space);
    CHECK(ring.lookup(0) == 0);
    CHECK(ring.lookup(0xdeadbeefdeadbeefULL) == 0);
}

TEST_CASE("the layouts agree almost everywhere", "[ring]") {
    // B truncates positions to 32 bits, so disagreements are confined to
    // keys whose high word collides with a point cell.
    const RingConfig config{200, 50, 13};
    const RingA a = RingA::build(config);
    const RingB b = RingB::build(config);
    SplitMix64 keys(91);
    int disagreements = 0;
    constexpr int kKeys = 20000;
    for (int i = 0; i < kKeys; ++i) {
        const KeyHash key = keys.next();
        if (a.bucket_for_key(key) != b.bucket_for_key(key)) ++disagreements;
    }
    CHECK(disagreements <= kKeys / 1000);
}
