#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "chl/jump.hpp"
#include "chl/mix.hpp"

namespace chl {

/// Per-(key, bucket) score for highest-random-weight hashing.
constexpr std::uint64_t hrw_score(KeyHash key, BucketIndex bucket) noexcept {
    return mix64(key ^ point_hash(bucket, 0, 0));
}

/// Rendezvous (highest-random-weight) hashing: the bucket in [0, num_buckets)
/// with the highest score wins.  O(n) per lookup.  Ties go to the smallest
/// bucket id so the mapping is total even on 64-bit score collisions.
inline BucketIndex hrw_bucket(KeyHash key, BucketCount num_buckets) {
    detail::require_bucket_count(num_buckets);
    BucketIndex best = 0;
    std::uint64_t best_score = hrw_score(key, 0);
    for (BucketIndex b = 1; b < num_buckets; ++b) {
        const std::uint64_t score = hrw_score(key, b);
        if (score > best_score) {
            best = b;
            best_score = score;
        }
    }
    return best;
}

/// hrw_bucket restricted to an explicit candidate set, for rings of buckets
/// with holes (e.g. after a removal).  Same score and tie rules.
inline BucketIndex hrw_bucket_among(KeyHash key, std::span<const BucketIndex> candidates) {
    if (candidates.empty()) {
        throw std::invalid_argument("hrw: candidate set must not be empty");
    }
    BucketIndex best = candidates[0];
    std::uint64_t best_score = hrw_score(key, best);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const BucketIndex b = candidates[i];
        const std::uint64_t score = hrw_score(key, b);
        if (score > best_score || (score == best_score && b < best)) {
            best = b;
            best_score = score;
        }
    }
    return best;
}

}  // namespace chl
