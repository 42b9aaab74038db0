// Command-line front end: assignment, balance/rebalance analysis, iteration
// statistics, timing, and the ring space model, emitted as CSV or JSON.
// Exit codes: 0 success, 2 usage error, 3 runtime error.

#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chl/chl.hpp"

namespace {

using Assigner = std::function<chl::BucketIndex(chl::KeyHash)>;

Assigner make_assigner(const std::string& alg, chl::BucketCount num_buckets,
                       std::uint32_t points, std::uint64_t seed) {
    if (alg == "jump") {
        return [num_buckets](chl::KeyHash key) {
            return chl::jump_bucket(key, num_buckets);
        };
    }
    if (alg == "hrw") {
        return [num_buckets](chl::KeyHash key) {
            return chl::hrw_bucket(key, num_buckets);
        };
    }
    const chl::RingConfig config{num_buckets, points, seed};
    if (alg == "ring-a") {
        auto ring = std::make_shared<chl::RingA>(chl::RingA::build(config));
        return [ring](chl::KeyHash key) { return ring->bucket_for_key(key); };
    }
    auto ring = std::make_shared<chl::RingB>(chl::RingB::build(config));
    return [ring](chl::KeyHash key) { return ring->bucket_for_key(key); };
}

bool is_ring(const std::string& alg) {
    return alg == "ring-a" || alg == "ring-b";
}

void emit(const std::vector<chl::ReportRow>& rows, const std::string& format) {
    std::cout << (format == "json" ? chl::to_json(rows) : chl::to_csv(rows));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consistent-hash lab: assignment, balance, movement, and timing"};
    app.require_subcommand(1);

    const auto alg_values = CLI::IsMember({"jump", "ring-a", "ring-b", "hrw"});
    const auto format_values = CLI::IsMember({"csv", "json"});
    const auto bucket_range = CLI::Range(std::int64_t(1), std::int64_t(2147483647));

    // assign
    auto* assign_cmd = app.add_subcommand("assign", "map one key to a bucket");
    std::string assign_alg = "jump";
    std::uint64_t assign_key = 0;
    std::int64_t assign_buckets = 0;
    std::uint32_t assign_points = 1;
    std::uint64_t assign_seed = 0;
    assign_cmd->add_option("--alg", assign_alg)->check(alg_values);
    assign_cmd->add_option("--key", assign_key, "64-bit key")->required();
    assign_cmd->add_option("--buckets", assign_buckets)->required()->check(bucket_range);
    auto* assign_points_opt = assign_cmd->add_option("--points", assign_points)
                                  ->check(CLI::Range(1u, 4294967295u));
    auto* assign_seed_opt = assign_cmd->add_option("--seed", assign_seed);

    // balance
    auto* balance_cmd = app.add_subcommand("balance", "per-bucket key-space share");
    std::string balance_alg = "jump";
    std::int64_t balance_buckets = 0;
    std::uint32_t balance_points = 1;
    std::uint64_t balance_seed = 0;
    std::uint64_t balance_keys = 1000000;
    bool balance_exact = false;
    std::string balance_format = "csv";
    balance_cmd->add_option("--alg", balance_alg)->check(alg_values);
    balance_cmd->add_option("--buckets", balance_buckets)->required()->check(bucket_range);
    balance_cmd->add_option("--points", balance_points)->check(CLI::Range(1u, 4294967295u));
    balance_cmd->add_option("--seed", balance_seed);
    balance_cmd->add_option("--keys", balance_keys, "sampled keys");
    balance_cmd->add_flag("--exact", balance_exact, "exact arc accounting (rings only)");
    balance_cmd->add_option("--format", balance_format)->check(format_values);

    // rebalance
    auto* rebalance_cmd =
        app.add_subcommand("rebalance", "key movement between two bucket counts");
    std::string rebalance_alg = "jump";
    std::int64_t rebalance_from = 0;
    std::int64_t rebalance_to = 0;
    std::uint32_t rebalance_points = 1;
    std::uint64_t rebalance_seed = 0;
    std::uint64_t rebalance_keys = 1000000;
    std::string rebalance_format = "csv";
    rebalance_cmd->add_option("--alg", rebalance_alg)->check(alg_values);
    rebalance_cmd->add_option("--from", rebalance_from)->required()->check(bucket_range);
    rebalance_cmd->add_option("--to", rebalance_to)->required()->check(bucket_range);
    rebalance_cmd->add_option("--points", rebalance_points)
        ->check(CLI::Range(1u, 4294967295u));
    rebalance_cmd->add_option("--seed", rebalance_seed);
    rebalance_cmd->add_option("--keys", rebalance_keys);
    rebalance_cmd->add_option("--format", rebalance_format)->check(format_values);

    // iters
    auto* iters_cmd = app.add_subcommand("iters", "jump loop iteration statistics");
    std::int64_t iters_buckets = 0;
    std::uint64_t iters_keys = 100000;
    std::uint64_t iters_seed = 0;
    std::string iters_format = "csv";
    iters_cmd->add_option("--buckets", iters_buckets)->required()->check(bucket_range);
    iters_cmd->add_option("--keys", iters_keys);
    iters_cmd->add_option("--seed", iters_seed);
    iters_cmd->add_option("--format", iters_format)->check(format_values);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "nanoseconds per assignment");
    std::string bench_alg = "jump";
    std::vector<std::int64_t> bench_buckets;
    std::uint32_t bench_points = 1;
    std::uint64_t bench_seed = 0;
    std::uint64_t bench_keys = 100000;
    bool bench_cache = false;
    std::uint64_t bench_filler = chl::CachePressureConfig{}.filler_bytes;
    std::string bench_format = "csv";
    bench_cmd->add_option("--alg", bench_alg)->check(alg_values);
    bench_cmd->add_option("--buckets", bench_buckets, "bucket counts, comma-separated")
        ->required()
        ->delimiter(',')
        ->check(bucket_range);
    bench_cmd->add_option("--points", bench_points)->check(CLI::Range(1u, 4294967295u));
    bench_cmd->add_option("--seed", bench_seed);
    bench_cmd->add_option("--keys", bench_keys, "iterations per timed pass");
    auto* bench_cache_opt =
        bench_cmd->add_flag("--cache-pressure", bench_cache,
                            "interleave memory traffic with each assignment");
    bench_cmd->add_option("--filler-bytes", bench_filler, "cache-pressure filler size")
        ->needs(bench_cache_opt);
    bench_cmd->add_option("--format", bench_format)->check(format_values);

    // space
    auto* space_cmd = app.add_subcommand("space", "ring memory model");
    std::string space_alg;
    std::vector<std::int64_t> space_buckets;
    std::uint32_t space_points = 1;
    std::string space_format = "csv";
    space_cmd->add_option("--alg", space_alg, "restrict to one layout")
        ->check(CLI::IsMember({"ring-a", "ring-b"}));
    space_cmd->add_option("--buckets", space_buckets, "bucket counts, comma-separated")
        ->required()
        ->delimiter(',')
        ->check(bucket_range);
    space_cmd->add_option("--points", space_points)->check(CLI::Range(1u, 4294967295u));
    space_cmd->add_option("--format", space_format)->check(format_values);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (assign_cmd->parsed()) {
            if (is_ring(assign_alg) &&
                (assign_points_opt->count() == 0 || assign_seed_opt->count() == 0)) {
                throw std::invalid_argument(
                    "assign: ring algorithms need explicit --points and --seed");
            }
            const Assigner assigner =
                make_assigner(assign_alg, static_cast<chl::BucketCount>(assign_buckets),
                              assign_points, assign_seed);
            std::cout << assigner(assign_key) << '\n';
            return 0;
        }

        if (balance_cmd->parsed()) {
            const auto n = static_cast<chl::BucketCount>(balance_buckets);
            chl::BalanceReport report;
            if (balance_exact) {
                if (!is_ring(balance_alg)) {
                    throw std::invalid_argument("balance: --exact applies to rings only");
                }
                const chl::RingConfig config{n, balance_points, balance_seed};
                report = balance_alg == "ring-a"
                             ? chl::exact_ring_balance(chl::RingA::build(config))
                             : chl::exact_ring_balance(chl::RingB::build(config));
            } else {
                const Assigner assigner =
                    make_assigner(balance_alg, n, balance_points, balance_seed);
                report = chl::sampled_balance(balance_alg, assigner, n, balance_keys,
                                              balance_seed);
            }
            chl::ReportRow proto;
            proto.experiment = "balance";
            proto.algorithm = report.algorithm;
            proto.n = static_cast<std::uint64_t>(n);
            if (is_ring(balance_alg)) proto.k = balance_points;
            proto.seed = balance_seed;
            if (!report.exact) proto.keys = report.num_keys;
            std::vector<chl::ReportRow> rows;
            auto push = [&](const char* metric, std::string value) {
                chl::ReportRow row = proto;
                row.metric = metric;
                row.value = std::move(value);
                rows.push_back(std::move(row));
            };
            push("std_error", chl::format_fraction(report.std_error));
            push("ci_low", chl::format_fraction(report.ci_low));
            push("ci_high", chl::format_fraction(report.ci_high));
            emit(rows, balance_format);
            return 0;
        }

        if (rebalance_cmd->parsed()) {
            const auto from = static_cast<chl::BucketCount>(rebalance_from);
            const auto to = static_cast<chl::BucketCount>(rebalance_to);
            const Assigner assign_from =
                make_assigner(rebalance_alg, from, rebalance_points, rebalance_seed);
            const Assigner assign_to =
                make_assigner(rebalance_alg, to, rebalance_points, rebalance_seed);
            const chl::RebalanceReport report =
                chl::rebalance_report(rebalance_alg, assign_from, assign_to, from, to,
                                      rebalance_keys, rebalance_seed);
            chl::ReportRow proto;
            proto.experiment = "rebalance";
            proto.algorithm = report.algorithm;
            proto.n = static_cast<std::uint64_t>(from);
            proto.n_to = static_cast<std::uint64_t>(to);
            if (is_ring(rebalance_alg)) proto.k = rebalance_points;
            proto.seed = rebalance_seed;
            proto.keys = report.num_keys;
            std::vector<chl::ReportRow> rows;
            auto push = [&](const char* metric, std::string value) {
                chl::ReportRow row = proto;
                row.metric = metric;
                row.value = std::move(value);
                rows.push_back(std::move(row));
            };
            push("moved", chl::format_count(report.moved));
            push("moved_fraction", chl::format_fraction(report.moved_fraction()));
            push("violations", chl::format_count(report.violations));
            push("donors", chl::format_count(report.donors().size()));
            emit(rows, rebalance_format);
            return 0;
        }

        if (iters_cmd->parsed()) {
            const chl::IterationReport report = chl::iteration_stats(
                static_cast<chl::BucketCount>(iters_buckets), iters_keys, iters_seed);
            chl::ReportRow proto;
            proto.experiment = "iters";
            proto.algorithm = "jump";
            proto.n = static_cast<std::uint64_t>(report.num_buckets);
            proto.seed = report.seed;
            proto.keys = report.num_keys;
            std::vector<chl::ReportRow> rows;
            auto push = [&](const char* metric, std::string value) {
                chl::ReportRow row = proto;
                row.metric = metric;
                row.value = std::move(value);
                rows.push_back(std::move(row));
            };
            push("mean_iterations", chl::format_fraction(report.mean_iterations));
            push("max_iterations", chl::format_count(report.max_iterations));
            push("harmonic", chl::format_fraction(report.harmonic));
            push("log_bound", chl::format_fraction(report.log_bound));
            push("within_bound", chl::format_count(report.within_bound ? 1 : 0));
            emit(rows, iters_format);
            return 0;
        }

        if (bench_cmd->parsed()) {
            std::optional<chl::CachePressureConfig> cache;
            if (bench_cache) {
                chl::CachePressureConfig config;
                config.filler_bytes = bench_filler;
                cache = config;
            }
            std::vector<chl::ReportRow> rows;
            for (const std::int64_t buckets : bench_buckets) {
                const auto n = static_cast<chl::BucketCount>(buckets);
                const Assigner assigner =
                    make_assigner(bench_alg, n, bench_points, bench_seed);
                const chl::BenchResult result = chl::time_assign(
                    bench_alg, assigner, n, bench_keys, cache, bench_seed);
                chl::ReportRow row;
                row.experiment = "bench";
                row.algorithm = result.algorithm;
                row.n = static_cast<std::uint64_t>(n);
                if (is_ring(bench_alg)) row.k = bench_points;
                row.seed = bench_seed;
                row.keys = result.iterations;
                row.metric = result.cache_pressure ? "ns_per_op_cache" : "ns_per_op";
                row.value = chl::format_ns(result.ns_per_op);
                rows.push_back(std::move(row));
            }
            emit(rows, bench_format);
            return 0;
        }

        if (space_cmd->parsed()) {
            std::vector<chl::RingLayout> layouts;
            if (space_alg.empty() || space_alg == "ring-a") {
                layouts.push_back(chl::RingLayout::A);
            }
            if (space_alg.empty() || space_alg == "ring-b") {
                layouts.push_back(chl::RingLayout::B);
            }
            std::vector<chl::ReportRow> rows;
            for (const std::int64_t buckets : space_buckets) {
                for (const chl::RingLayout layout : layouts) {
                    const chl::MemoryModel model = chl::memory_model(
                        layout, static_cast<chl::BucketCount>(buckets), space_points);
                    chl::ReportRow proto;
                    proto.experiment = "space";
                    proto.algorithm = std::string(chl::layout_name(layout));
                    proto.n = static_cast<std::uint64_t>(buckets);
                    proto.k = space_points;
                    proto.metric = "model_bytes";
                    proto.value = chl::format_count(model.total_bytes);
                    rows.push_back(proto);
                    proto.metric = "model_size";
                    proto.value = chl::format_bytes(model.total_bytes);
                    rows.push_back(std::move(proto));
                }
            }
            emit(rows, space_format);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
