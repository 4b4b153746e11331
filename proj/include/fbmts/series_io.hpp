#pragma once

// CSV ingestion: long-format consumption records and single-column value files.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fbmts/error.hpp"

namespace fbmts {

enum class Quantity { P, S };

constexpr std::string_view to_string(Quantity q) noexcept
{
    return q == Quantity::P ? "P" : "S";
}

enum class GapPolicy { drop, interpolate_linear };

constexpr std::string_view to_string(GapPolicy policy) noexcept
{
    return policy == GapPolicy::drop ? "drop" : "interpolate-linear";
}

inline GapPolicy parse_gap_policy(std::string_view text)
{
    if (text == "drop") {
        return GapPolicy::drop;
    }
    if (text == "interpolate-linear") {
        return GapPolicy::interpolate_linear;
    }
    throw Error(ErrorKind::configuration, "unknown gap policy '" + std::string(text) + "'");
}

/// One observed series for a (building, quantity) key. Timestamps are seconds
/// since the Unix epoch, strictly increasing.
struct RawSeries {
    std::string building_id;
    Quantity quantity = Quantity::P;
    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    std::vector<std::string> warnings;
};

struct LoadResult {
    std::vector<RawSeries> series;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Splits one CSV record; double quotes group commas and "" is a literal quote.
inline std::vector<std::string> split_csv(std::string_view line)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            }
            else if (ch == '"') {
                quoted = false;
            }
            else {
                fields.back() += ch;
            }
        }
        else if (ch == '"') {
            quoted = true;
        }
        else if (ch == ',') {
            fields.emplace_back();
        }
        else {
            fields.back() += ch;
        }
    }
    for (auto& f : fields) {
        f = std::string(trim(f));
    }
    return fields;
}

inline std::optional<double> parse_double(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

inline std::optional<int> parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len)
{
    if (pos + len > text.size()) {
        return std::nullopt;
    }
    int value = 0;
    const char* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc() || ptr != first + len) {
        return std::nullopt;
    }
    return value;
}

} // namespace detail

/// Parses `YYYY-MM-DD[T| ]HH:MM[:SS][Z]` (UTC) into Unix seconds.
inline std::optional<std::int64_t> parse_timestamp(std::string_view text)
{
    using namespace std::chrono;
    text = detail::trim(text);
    if (!text.empty() && text.back() == 'Z') {
        text.remove_suffix(1);
    }
    if (text.size() != 16 && text.size() != 19) {
        return std::nullopt;
    }
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
        return std::nullopt;
    }
    const auto y = detail::parse_fixed_int(text, 0, 4);
    const auto mo = detail::parse_fixed_int(text, 5, 2);
    const auto d = detail::parse_fixed_int(text, 8, 2);
    const auto hh = detail::parse_fixed_int(text, 11, 2);
    const auto mm = detail::parse_fixed_int(text, 14, 2);
    std::optional<int> ss = 0;
    if (text.size() == 19) {
        if (text[16] != ':') {
            return std::nullopt;
        }
        ss = detail::parse_fixed_int(text, 17, 2);
    }
    if (!y || !mo || !d || !hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 59) {
        return std::nullopt;
    }
    const year_month_day date{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    const auto day_start = sys_days{date}.time_since_epoch();
    return duration_cast<seconds>(day_start).count() + *hh * 3600 + *mm * 60 + *ss;
}

/// Inverse of parse_timestamp, `YYYY-MM-DDTHH:MM:SSZ`.
inline std::string format_timestamp(std::int64_t seconds_since_epoch)
{
    using namespace std::chrono;
    const sys_seconds tp{seconds{seconds_since_epoch}};
    const auto day_point = floor<days>(tp);
    const year_month_day date{day_point};
    const hh_mm_ss<seconds> time{tp - day_point};
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                  static_cast<long>(time.hours().count()), static_cast<long>(time.minutes().count()),
                  static_cast<long>(time.seconds().count()));
    return buffer;
}

/// Long-format `timestamp,building,quantity,value` records (columns located by
/// header name). Blank values are gaps: dropped, or filled by linear
/// interpolation in time between the nearest observed neighbours.
inline LoadResult parse_long_csv(std::istream& in, GapPolicy gap_policy = GapPolicy::drop)
{
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            header = detail::split_csv(line);
            break;
        }
    }
    if (header.empty()) {
        throw Error(ErrorKind::input, "line 1: missing header");
    }
    auto column = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            std::string lowered = header[i];
            std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
            if (lowered == name) {
                return i;
            }
        }
        throw Error(ErrorKind::input, "line " + std::to_string(line_no) + ": header lacks column '" +
                                          std::string(name) + "' (expected timestamp,building,quantity,value)");
    };
    const std::size_t ts_col = column("timestamp");
    const std::size_t building_col = column("building");
    const std::size_t quantity_col = column("quantity");
    const std::size_t value_col = column("value");
    const std::size_t width = std::max({ts_col, building_col, quantity_col, value_col}) + 1;

    struct Row {
        std::int64_t timestamp;
        std::optional<double> value;
        std::size_t line;
    };
    std::map<std::pair<std::string, Quantity>, std::vector<Row>> grouped;

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split_csv(line);
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (fields.size() < width) {
            throw Error(ErrorKind::input, where + "expected " + std::to_string(header.size()) + " fields, got " +
                                              std::to_string(fields.size()));
        }
        const auto ts = parse_timestamp(fields[ts_col]);
        if (!ts) {
            throw Error(ErrorKind::input, where + "unparsable timestamp '" + fields[ts_col] + "'");
        }
        if (fields[building_col].empty()) {
            throw Error(ErrorKind::input, where + "empty building id");
        }
        Quantity quantity;
        if (fields[quantity_col] == "P" || fields[quantity_col] == "p") {
            quantity = Quantity::P;
        }
        else if (fields[quantity_col] == "S" || fields[quantity_col] == "s") {
            quantity = Quantity::S;
        }
        else {
            throw Error(ErrorKind::input, where + "quantity must be P or S, got '" + fields[quantity_col] + "'");
        }
        std::optional<double> value;
        if (!fields[value_col].empty()) {
            value = detail::parse_double(fields[value_col]);
            if (!value) {
                throw Error(ErrorKind::input, where + "unparsable value '" + fields[value_col] + "'");
            }
        }
        grouped[{fields[building_col], quantity}].push_back({*ts, value, line_no});
    }

    LoadResult result;
    for (auto& [key, rows] : grouped) {
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.timestamp < b.timestamp; });
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].timestamp == rows[i - 1].timestamp) {
                throw Error(ErrorKind::input, "line " + std::to_string(rows[i].line) + ": duplicate timestamp " +
                                                  format_timestamp(rows[i].timestamp) + " for building '" +
                                                  key.first + "' quantity " + std::string(to_string(key.second)) +
                                                  " (first seen on line " + std::to_string(rows[i - 1].line) + ")");
            }
        }

        RawSeries series;
        series.building_id = key.first;
        series.quantity = key.second;
        const auto gaps = std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.value; });
        std::size_t interpolated = 0;
        std::size_t dropped = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].value) {
                series.timestamps.push_back(rows[i].timestamp);
                series.values.push_back(*rows[i].value);
                continue;
            }
            if (gap_policy == GapPolicy::interpolate_linear) {
                std::size_t before = i;
                while (before > 0 && !rows[before - 1].value) {
                    --before;
                }
                std::size_t after = i + 1;
                while (after < rows.size() && !rows[after].value) {
                    ++after;
                }
                if (before > 0 && after < rows.size()) {
                    const Row& left = rows[before - 1];
                    const Row& right = rows[after];
                    const double w = static_cast<double>(rows[i].timestamp - left.timestamp) /
                                     static_cast<double>(right.timestamp - left.timestamp);
                    series.timestamps.push_back(rows[i].timestamp);
                    series.values.push_back(*left.value + w * (*right.value - *left.value));
                    ++interpolated;
                    continue;
                }
            }
            ++dropped;
        }
        const std::string label = "'" + series.building_id + "' " + std::string(to_string(series.quantity));
        if (gaps > 0) {
            std::string note = label + ": " + std::to_string(gaps) + " missing value(s)";
            if (interpolated > 0) {
                note += ", " + std::to_string(interpolated) + " interpolated";
            }
            if (dropped > 0) {
                note += ", " + std::to_string(dropped) + " dropped";
            }
            series.warnings.push_back(note);
            result.warnings.push_back(note);
        }
        if (series.values.size() < 9) {
            const std::string note = label + ": only " + std::to_string(series.values.size()) +
                                     " observation(s), at least 9 are needed for analysis";
            series.warnings.push_back(note);
            result.warnings.push_back(note);
        }
        result.series.push_back(std::move(series));
    }
    return result;
}

inline LoadResult load_csv(const std::string& path, GapPolicy gap_policy = GapPolicy::drop)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::input, "cannot open '" + path + "'");
    }
    return parse_long_csv(in, gap_policy);
}

/// Reads the last field of every record as a number. Blank lines and lines
/// starting with '#' are skipped; a non-numeric first record is a header.
inline std::vector<double> parse_value_column(std::istream& in)
{
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool first_record = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        const auto fields = detail::split_csv(trimmed);
        const auto value = detail::parse_double(fields.back());
        if (!value) {
            if (first_record) {
                first_record = false;
                continue;
            }
            throw Error(ErrorKind::input, "line " + std::to_string(line_no) + ": unparsable value '" + fields.back() + "'");
        }
        first_record = false;
        values.push_back(*value);
    }
    return values;
}

inline std::vector<double> load_value_column(const std::string& path)
{
    if (path == "-") {
        return parse_value_column(std::cin);
    }
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::input, "cannot open '" + path + "'");
    }
    return parse_value_column(in);
}

} // namespace fbmts
