#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gapfill/error.hpp"

namespace gapfill {

enum class Period { yearly, quarterly, monthly, other };

inline const char* to_string(Period p) {
    switch (p) {
        case Period::yearly: return "yearly";
        case Period::quarterly: return "quarterly";
        case Period::monthly: return "monthly";
        default: return "other";
    }
}

/// Unit-spaced univariate series. A disengaged optional marks a missing observation.
struct TimeSeries {
    std::string id;
    Period period = Period::other;
    std::vector<std::optional<double>> values;

    std::size_t length() const { return values.size(); }

    std::size_t present_count() const {
        std::size_t n = 0;
        for (const auto& v : values)
            if (v) ++n;
        return n;
    }

    bool complete() const { return present_count() == values.size(); }

    /// Present values in index order.
    std::vector<double> present_values() const {
        std::vector<double> out;
        out.reserve(values.size());
        for (const auto& v : values)
            if (v) out.push_back(*v);
        return out;
    }

    /// All values of a series known to be complete.
    std::vector<double> dense() const {
        std::vector<double> out;
        out.reserve(values.size());
        for (const auto& v : values) {
            if (!v) throw DataError("series '" + id + "' has missing values where none are allowed");
            out.push_back(*v);
        }
        return out;
    }

    static TimeSeries from_dense(std::string id, Period period, const std::vector<double>& vals) {
        TimeSeries ts;
        ts.id = std::move(id);
        ts.period = period;
        ts.values.reserve(vals.size());
        for (double v : vals) ts.values.emplace_back(v);
        return ts;
    }
};

/// Contiguous run of T missing values starting at index p.
/// Requires one observed point strictly before and after the gap so both hinges exist.
struct GapSpec {
    std::size_t start = 0;
    std::size_t size = 0;

    void validate(std::size_t series_length) const {
        if (size == 0) throw ConfigError("gap size must be positive");
        if (start < 1 || start + size > series_length - 1)
            throw ConfigError("gap [" + std::to_string(start) + ", " + std::to_string(start + size) +
                              ") must leave at least one observation on each side of a length-" +
                              std::to_string(series_length) + " series");
    }
};

/// A series with one simulated gap plus the held-out truth. `removed` is empty when
/// the gap was genuinely missing in the input.
struct MaskedSeries {
    TimeSeries base;
    GapSpec gap;
    std::vector<double> removed;
};

struct ScaleParams {
    double min = 0.0;
    double max = 0.0;

    bool degenerate() const { return max == min; }
};

/// Removes gap.size values starting at gap.start and stores them as ground truth.
inline MaskedSeries inject_gap(const TimeSeries& series, const GapSpec& gap) {
    if (!series.complete())
        throw DataError("series '" + series.id + "' already contains missing values");
    gap.validate(series.length());

    MaskedSeries out;
    out.base = series;
    out.gap = gap;
    out.removed.reserve(gap.size);
    for (std::size_t i = gap.start; i < gap.start + gap.size; ++i) {
        out.removed.push_back(*series.values[i]);
        out.base.values[i].reset();
    }
    return out;
}

/// Recognizes an input that already carries exactly one contiguous gap within GapSpec bounds.
inline MaskedSeries adopt_gap(const TimeSeries& series) {
    std::size_t first = series.length(), last = 0;
    std::size_t missing = 0;
    for (std::size_t i = 0; i < series.length(); ++i) {
        if (!series.values[i]) {
            first = std::min(first, i);
            last = i;
            ++missing;
        }
    }
    if (missing == 0) throw DataError("series '" + series.id + "' has no missing values to impute");
    if (last - first + 1 != missing)
        throw DataError("series '" + series.id + "' has non-contiguous missing values; only one gap is supported");
    GapSpec gap{first, missing};
    gap.validate(series.length());

    MaskedSeries out;
    out.base = series;
    out.gap = gap;
    return out;
}

struct ScaledSeries {
    TimeSeries series;
    ScaleParams params;
};

/// Min-max rescaling over present values only; absent positions pass through.
/// A constant series maps to 0.5 everywhere (the recorded params still invert exactly).
inline ScaledSeries minmax_scale(const TimeSeries& series) {
    double lo = 0.0, hi = 0.0;
    std::size_t n = 0;
    for (const auto& v : series.values) {
        if (!v) continue;
        if (n == 0) { lo = hi = *v; }
        else {
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
        ++n;
    }
    if (n < 2) throw DataError("series '" + series.id + "' needs at least two present values to scale");

    ScaledSeries out;
    out.params = ScaleParams{lo, hi};
    out.series = series;
    const double range = hi - lo;
    for (auto& v : out.series.values) {
        if (!v) continue;
        v = range == 0.0 ? 0.5 : (*v - lo) / range;
    }
    return out;
}

inline ScaledSeries minmax_scale(const MaskedSeries& masked) { return minmax_scale(masked.base); }

inline double minmax_unscale_value(double v, const ScaleParams& params) {
    return v * (params.max - params.min) + params.min;
}

inline std::vector<double> minmax_unscale(const std::vector<double>& scaled, const ScaleParams& params) {
    std::vector<double> out;
    out.reserve(scaled.size());
    for (double v : scaled) out.push_back(minmax_unscale_value(v, params));
    return out;
}

inline double scale_value(double v, const ScaleParams& params) {
    return params.degenerate() ? 0.5 : (v - params.min) / (params.max - params.min);
}

} // namespace gapfill
