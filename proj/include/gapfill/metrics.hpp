#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "gapfill/detail/numeric.hpp"
#include "gapfill/error.hpp"
#include "gapfill/series.hpp"

namespace gapfill {

struct MetricRecord {
    double smape = 0.0; // percent, [0,200]
    double rmse = 0.0;  // series units
    double mae = 0.0;   // series units
    double sim = 1.0;   // (0,1]
};

namespace detail {
inline void check_lengths(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size() || actual.empty())
        throw std::invalid_argument("metric inputs must have equal nonzero lengths");
}
} // namespace detail

/// Symmetric MAPE in percent, bounded to [0,200]; a term with both values zero counts as 0.
inline double smape(std::span<const double> actual, std::span<const double> predicted) {
    detail::check_lengths(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double denom = std::abs(actual[i]) + std::abs(predicted[i]);
        if (denom == 0.0) continue;
        sum += 2.0 * std::abs(predicted[i] - actual[i]) / denom;
    }
    return 100.0 * sum / static_cast<double>(actual.size());
}

inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
    detail::check_lengths(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = predicted[i] - actual[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

inline double mae(std::span<const double> actual, std::span<const double> predicted) {
    detail::check_lengths(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(predicted[i] - actual[i]);
    return sum / static_cast<double>(actual.size());
}

/// Range-normalized similarity in (0,1]; 1 iff the sequences are identical.
/// series_range is max-min of the ground-truth series; a zero range falls back
/// to 1 when all differences vanish and to range 1 otherwise.
inline double sim(std::span<const double> actual, std::span<const double> predicted, double series_range) {
    detail::check_lengths(actual, predicted);
    double range = series_range;
    if (range == 0.0) {
        bool all_equal = true;
        for (std::size_t i = 0; i < actual.size(); ++i)
            if (actual[i] != predicted[i]) all_equal = false;
        if (all_equal) return 1.0;
        range = 1.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        sum += 1.0 / (1.0 + std::abs(predicted[i] - actual[i]) / range);
    return sum / static_cast<double>(actual.size());
}

inline MetricRecord evaluate(std::span<const double> actual, std::span<const double> predicted,
                             double series_range) {
    return MetricRecord{smape(actual, predicted), rmse(actual, predicted), mae(actual, predicted),
                        sim(actual, predicted, series_range)};
}

/// MacKinnon 5% critical value for the constant-only Dickey-Fuller regression.
inline constexpr double kAdf5PercentCritical = -2.86;

namespace detail {

struct AdfResult {
    double gamma = 0.0;
    double t_stat = 0.0;
    bool perfect_fit = false;
    bool stationary = false;
};

/// ADF regression: diff(x)_t = a + gamma*x_{t-1} + sum b_i diff(x)_{t-i}, constant
/// only, lag order floor((L-1)^(1/3)).
inline AdfResult adf_run(std::span<const double> x) {
    const std::size_t L = x.size();
    if (L < 20) throw DataError("ADF test needs at least 20 observations");

    const auto q = static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(L - 1))));
    const std::size_t n = L - 1 - q; // usable regression rows
    if (n < q + 3) throw DataError("ADF test has too few usable rows");

    std::vector<double> diff(L - 1);
    for (std::size_t t = 0; t + 1 < L; ++t) diff[t] = x[t + 1] - x[t];

    // columns: intercept, lagged level, q lagged differences
    std::vector<std::vector<double>> cols(2 + q, std::vector<double>(n));
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t ti = t + q; // index into diff
        y[t] = diff[ti];
        cols[0][t] = 1.0;
        cols[1][t] = x[ti];
        for (std::size_t lag = 1; lag <= q; ++lag) cols[1 + lag][t] = diff[ti - lag];
    }

    const auto fit = ols_fit(cols, y);
    AdfResult res;
    res.gamma = fit.coef[1];

    double yscale = 0.0;
    for (double v : y) yscale += v * v;
    yscale = yscale / static_cast<double>(n) + 1.0;
    if (fit.sigma2() <= 1e-18 * yscale) {
        // perfectly explained response: decide on the mean-reversion coefficient alone
        res.perfect_fit = true;
        res.stationary = res.gamma < -1e-6;
        return res;
    }
    if (!fit.retained[1]) return res; // level column collinear: cannot reject

    const double se = std::sqrt(fit.sigma2() * ols_inverse_diagonal(cols, fit.retained, 1));
    if (se == 0.0) {
        res.perfect_fit = true;
        res.stationary = res.gamma < -1e-6;
        return res;
    }
    res.t_stat = res.gamma / se;
    res.stationary = res.t_stat < kAdf5PercentCritical;
    return res;
}

} // namespace detail

/// Augmented Dickey-Fuller unit-root test at the 5% level; true means stationary.
inline bool adf_is_stationary(std::span<const double> x) { return detail::adf_run(x).stationary; }

inline bool adf_is_stationary(const TimeSeries& series) {
    const auto dense = series.dense();
    return adf_is_stationary(std::span<const double>(dense));
}

} // namespace gapfill
