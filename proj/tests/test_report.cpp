#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "chl/report.hpp"
#include "json.hpp"

using namespace chl;

namespace {

std::vector<ReportRow> sample_rows() {
    ReportRow balance;
    balance.experiment = "balance";
    balance.algorithm = "jump";
    balance.n = 10;
    balance.seed = 0;
    balance.keys = 1000;
    balance.metric = "std_error";
    balance.value = "0.01";

    ReportRow rebalance;
    rebalance.experiment = "rebalance";
    rebalance.algorithm = "ring-a";
    rebalance.n = 10;
    rebalance.n_to = 12;
    rebalance.k = 100;
    rebalance.seed = 7;
    rebalance.keys = 500000;
    rebalance.metric = "moved_fraction";
    rebalance.value = "0.166666667";

    ReportRow space;
    space.experiment = "space";
    space.algorithm = "ring-b";
    space.n = 1000;
    space.k = 1000;
    space.metric = "model_size";
    space.value = "7.6 MB";

    return {balance, rebalance, space};
}

}  // namespace

TEST_CASE("csv emission is stable", "[report]") {
    const std::string csv = to_csv(sample_rows());
    CHECK(csv ==
          "experiment,algorithm,n,n_to,k,seed,keys,metric,value\n"
          "balance,jump,10,,,0,1000,std_error,0.01\n"
          "rebalance,ring-a,10,12,100,7,500000,moved_fraction,0.166666667\n"
          "space,ring-b,1000,,1000,,,model_size,7.6 MB\n");
}

TEST_CASE("csv round-trips", "[report]") {
    const std::vector<ReportRow> rows = sample_rows();
    const std::string csv = to_csv(rows);
    const std::vector<ReportRow> parsed = parse_csv(csv);
    CHECK(parsed == rows);
    CHECK(to_csv(parsed) == csv);
}

TEST_CASE("csv rejects malformed input", "[report]") {
    CHECK_THROWS_AS(parse_csv(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv("nope,header\n"), std::invalid_argument);
    const std::string header(kCsvHeader);
    CHECK_THROWS_AS(parse_csv(header + "\na,b,c\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv(header + "\na,b,x,,,,,m,1\n"), std::invalid_argument);
    // k wider than 32 bits
    CHECK_THROWS_AS(parse_csv(header + "\na,b,1,,5000000000,,,m,1\n"),
                    std::invalid_argument);
    // header alone is a valid, empty report
    CHECK(parse_csv(header + "\n").empty());
}

TEST_CASE("json emission", "[report]") {
    const nlohmann::json parsed = nlohmann::json::parse(to_json(sample_rows()));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0]["experiment"] == "balance");
    CHECK(parsed[0]["n"] == 10);
    CHECK(!parsed[0].contains("n_to"));
    CHECK(!parsed[0].contains("k"));
    CHECK(parsed[0]["value"].is_number());
    CHECK(parsed[0]["value"].get<double>() == 0.01);
    CHECK(parsed[1]["n_to"] == 12);
    CHECK(parsed[1]["k"] == 100);
    // rendered sizes stay strings
    CHECK(parsed[2]["value"].is_string());
    CHECK(parsed[2]["value"] == "7.6 MB");
    CHECK(!parsed[2].contains("seed"));
}

TEST_CASE("format helpers", "[report]") {
    CHECK(format_fraction(1.0 / 6.0) == "0.166666667");
    CHECK(format_fraction(0.5) == "0.5");
    CHECK(format_fraction(0.0) == "0");
    CHECK(format_ns(3.6) == "4");
    CHECK(format_ns(2.4) == "2");
    CHECK(format_ns(0.2) == "0");
    CHECK(format_count(123) == "123");
    CHECK(format_count(0) == "0");
}
