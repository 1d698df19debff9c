#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gapfill/error.hpp"
#include "gapfill/series.hpp"

namespace gapfill {

enum class CsvLayout {
    one_series_per_row, // id,period,v1,v2,...
    two_column          // index,value (single series)
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return std::string(s.substr(b, e - b));
}

inline bool is_missing_token(const std::string& field) {
    if (field.empty()) return true;
    if (field.size() != 3) return false;
    auto low = [](char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c); };
    return low(field[0]) == 'n' && low(field[1]) == 'a' && low(field[2]) == 'n';
}

inline double parse_number(const std::string& field, std::size_t row, std::size_t col) {
    const std::string t = trim(field);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw ParseError("malformed number '" + field + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col));
    return v;
}

inline Period parse_period(const std::string& field) {
    if (field.empty()) return Period::other;
    switch (field[0]) {
        case 'y': case 'Y': return Period::yearly;
        case 'q': case 'Q': return Period::quarterly;
        case 'm': case 'M': return Period::monthly;
        default: return Period::other;
    }
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace detail

inline std::vector<TimeSeries> load_csv(std::istream& in, CsvLayout layout) {
    std::vector<TimeSeries> out;
    std::string line;
    std::size_t row = 0;

    if (layout == CsvLayout::one_series_per_row) {
        while (std::getline(in, line)) {
            ++row;
            if (detail::trim(line).empty()) continue;
            auto fields = detail::split_csv_line(line);
            if (fields.size() < 3)
                throw ParseError("row " + std::to_string(row) + " needs id,period and at least one value");
            TimeSeries ts;
            ts.id = detail::trim(fields[0]);
            ts.period = detail::parse_period(detail::trim(fields[1]));
            for (std::size_t c = 2; c < fields.size(); ++c) {
                const std::string f = detail::trim(fields[c]);
                if (detail::is_missing_token(f))
                    ts.values.push_back(std::nullopt);
                else
                    ts.values.push_back(detail::parse_number(f, row, c + 1));
            }
            out.push_back(std::move(ts));
        }
    } else {
        TimeSeries ts;
        ts.id = "series";
        bool header_allowed = true;
        while (std::getline(in, line)) {
            ++row;
            if (detail::trim(line).empty()) continue;
            auto fields = detail::split_csv_line(line);
            if (fields.size() != 2)
                throw ParseError("row " + std::to_string(row) + " must be index,value");
            const std::string idx = detail::trim(fields[0]);
            // a leading non-numeric line is treated as a header
            if (header_allowed) {
                header_allowed = false;
                double probe;
                auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), probe);
                if (ec != std::errc{} || p != idx.data() + idx.size()) continue;
            }
            const std::string f = detail::trim(fields[1]);
            if (detail::is_missing_token(f))
                ts.values.push_back(std::nullopt);
            else
                ts.values.push_back(detail::parse_number(f, row, 2));
        }
        if (!ts.values.empty()) out.push_back(std::move(ts));
    }

    if (out.empty()) throw DataError("input contains no data rows");
    return out;
}

inline void write_csv(std::ostream& os, const std::vector<TimeSeries>& dataset, CsvLayout layout) {
    if (layout == CsvLayout::one_series_per_row) {
        for (const auto& ts : dataset) {
            os << ts.id << ',' << to_string(ts.period);
            for (const auto& v : ts.values) {
                os << ',';
                if (v) os << detail::format_number(*v);
            }
            os << '\n';
        }
    } else {
        if (dataset.size() != 1)
            throw ConfigError("two_column layout holds exactly one series");
        const auto& ts = dataset.front();
        os << "index,value\n";
        for (std::size_t i = 0; i < ts.values.size(); ++i) {
            os << i << ',';
            if (ts.values[i]) os << detail::format_number(*ts.values[i]);
            os << '\n';
        }
    }
}

} // namespace gapfill
