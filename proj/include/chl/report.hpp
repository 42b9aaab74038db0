#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace chl {

/// One output row.  Parameter columns are blank when they do not apply to
/// the experiment; `value` is stored pre-formatted so that emitted text
/// parses back to an identical row.  Field text must stay comma-free.
struct ReportRow {
    std::string experiment;
    std::string algorithm;
    std::optional<std::uint64_t> n;     // bucket count (source count for rebalance)
    std::optional<std::uint64_t> n_to;  // target bucket count, rebalance only
    std::optional<std::uint32_t> k;     // points per bucket, ring only
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> keys;  // sampled keys
    std::string metric;
    std::string value;

    bool operator==(const ReportRow&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,algorithm,n,n_to,k,seed,keys,metric,value";

/// Fractions and other reals: 9 significant digits.
inline std::string format_fraction(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

/// Nanosecond figures are reported as whole numbers.
inline std::string format_ns(double nanoseconds) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%lld",
                  static_cast<long long>(std::llround(nanoseconds)));
    return buffer;
}

inline std::string format_count(std::uint64_t value) {
    return std::to_string(value);
}

namespace detail {

inline void append_optional(std::string& out, const std::optional<std::uint64_t>& v) {
    if (v) out += std::to_string(*v);
}

inline std::optional<std::uint64_t> parse_optional_u64(std::string_view field) {
    if (field.empty()) return std::nullopt;
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw std::invalid_argument("report: bad integer field '" + std::string(field) + "'");
    }
    return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace detail

inline std::string to_csv(const std::vector<ReportRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const ReportRow& row : rows) {
        out += row.experiment;
        out += ',';
        out += row.algorithm;
        out += ',';
        detail::append_optional(out, row.n);
        out += ',';
        detail::append_optional(out, row.n_to);
        out += ',';
        if (row.k) out += std::to_string(*row.k);
        out += ',';
        detail::append_optional(out, row.seed);
        out += ',';
        detail::append_optional(out, row.keys);
        out += ',';
        out += row.metric;
        out += ',';
        out += row.value;
        out += '\n';
    }
    return out;
}

inline std::vector<ReportRow> parse_csv(std::string_view text) {
    std::vector<ReportRow> rows;
    bool saw_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kCsvHeader) {
                throw std::invalid_argument("report: missing or mismatched CSV header");
            }
            saw_header = true;
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 9) {
            throw std::invalid_argument("report: expected 9 fields, got " +
                                        std::to_string(fields.size()));
        }
        ReportRow row;
        row.experiment = std::string(fields[0]);
        row.algorithm = std::string(fields[1]);
        row.n = detail::parse_optional_u64(fields[2]);
        row.n_to = detail::parse_optional_u64(fields[3]);
        if (const auto k = detail::parse_optional_u64(fields[4])) {
            if (*k > 0xffffffffULL) {
                throw std::invalid_argument("report: k out of range");
            }
            row.k = static_cast<std::uint32_t>(*k);
        }
        row.seed = detail::parse_optional_u64(fields[5]);
        row.keys = detail::parse_optional_u64(fields[6]);
        row.metric = std::string(fields[7]);
        row.value = std::string(fields[8]);
        rows.push_back(std::move(row));
    }
    if (!saw_header) {
        throw std::invalid_argument("report: empty input");
    }
    return rows;
}

/// Same rows as an array of objects; absent parameters are omitted and
/// `value` is emitted as a bare number when it is one (a rendered size like
/// "46 MB" stays a string).
inline std::string to_json(const std::vector<ReportRow>& rows) {
    nlohmann::json array = nlohmann::json::array();
    for (const ReportRow& row : rows) {
        nlohmann::json object;
        object["experiment"] = row.experiment;
        object["algorithm"] = row.algorithm;
        if (row.n) object["n"] = *row.n;
        if (row.n_to) object["n_to"] = *row.n_to;
        if (row.k) object["k"] = *row.k;
        if (row.seed) object["seed"] = *row.seed;
        if (row.keys) object["keys"] = *row.keys;
        object["metric"] = row.metric;
        nlohmann::json value = nlohmann::json::parse(row.value, nullptr, false);
        if (value.is_discarded() || !value.is_number()) {
            object["value"] = row.value;
        } else {
            object["value"] = std::move(value);
        }
        array.push_back(std::move(object));
    }
    return array.dump(2) + "\n";
}

}  // namespace chl
