#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "gapfill/detail/numeric.hpp"
#include "gapfill/error.hpp"
#include "gapfill/log.hpp"
#include "gapfill/metrics.hpp"
#include "gapfill/series.hpp"

namespace gapfill {

enum class BaselineKind { mean, median, locf, nocb, linear, spline, knn, arima };

struct BaselineMethod {
    BaselineKind kind = BaselineKind::mean;
    std::optional<int> knn_k;  // grid-searched over {1,3,5,7} when unset
    int knn_window = 4;
    int arima_max_p = 5;
};

enum class CarryDirection { forward, backward }; // LOCF / NOCB

namespace detail {

inline TimeSeries copy_base(const MaskedSeries& masked) { return masked.base; }

inline void fill_gap(TimeSeries& ts, const GapSpec& gap, const std::vector<double>& values) {
    for (std::size_t m = 0; m < gap.size; ++m) ts.values[gap.start + m] = values[m];
}

} // namespace detail

inline TimeSeries impute_constant(const MaskedSeries& masked, BaselineKind statistic) {
    auto present = masked.base.present_values();
    if (present.empty()) throw DataError("constant imputation needs at least one present value");

    double fill = 0.0;
    if (statistic == BaselineKind::mean) {
        for (double v : present) fill += v;
        fill /= static_cast<double>(present.size());
    } else if (statistic == BaselineKind::median) {
        std::sort(present.begin(), present.end());
        const std::size_t n = present.size();
        fill = n % 2 == 1 ? present[n / 2] : 0.5 * (present[n / 2 - 1] + present[n / 2]);
    } else {
        throw ConfigError("impute_constant expects mean or median");
    }

    TimeSeries out = detail::copy_base(masked);
    for (auto& v : out.values)
        if (!v) v = fill;
    return out;
}

inline TimeSeries impute_carry(const MaskedSeries& masked, CarryDirection direction) {
    const auto& gap = masked.gap;
    const double fill = direction == CarryDirection::forward
                            ? *masked.base.values[gap.start - 1]
                            : *masked.base.values[gap.start + gap.size];
    TimeSeries out = detail::copy_base(masked);
    detail::fill_gap(out, gap, std::vector<double>(gap.size, fill));
    return out;
}

inline TimeSeries impute_linear(const MaskedSeries& masked) {
    const auto& gap = masked.gap;
    const double left = *masked.base.values[gap.start - 1];
    const double right = *masked.base.values[gap.start + gap.size];
    const double span = static_cast<double>(gap.size) + 1.0;

    std::vector<double> fill(gap.size);
    for (std::size_t m = 0; m < gap.size; ++m)
        fill[m] = left + (right - left) * (static_cast<double>(m) + 1.0) / span;

    TimeSeries out = detail::copy_base(masked);
    detail::fill_gap(out, gap, fill);
    return out;
}

namespace detail {

/// Natural cubic spline through (t_i, y_i); evaluates at arbitrary query points.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::vector<double> t, std::vector<double> y)
        : t_(std::move(t)), y_(std::move(y)) {
        const std::size_t n = t_.size();
        m_.assign(n, 0.0);
        if (n < 3) return;

        std::vector<double> lower(n - 2, 0.0), main(n - 2, 0.0), upper(n - 2, 0.0), rhs(n - 2, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t_[i] - t_[i - 1];
            const double h1 = t_[i + 1] - t_[i];
            lower[i - 1] = h0 / 6.0;
            main[i - 1] = (h0 + h1) / 3.0;
            upper[i - 1] = h1 / 6.0;
            rhs[i - 1] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
        }
        const auto sol = solve_tridiagonal(lower, main, upper, rhs);
        for (std::size_t i = 0; i + 2 < n; ++i) m_[i + 1] = sol[i];
    }

    double operator()(double t) const {
        const std::size_t n = t_.size();
        std::size_t i = 0;
        if (t >= t_[n - 2]) {
            i = n - 2;
        } else {
            auto it = std::upper_bound(t_.begin(), t_.end(), t);
            i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
            i = std::min(i, n - 2);
        }
        const double h = t_[i + 1] - t_[i];
        const double a = (t_[i + 1] - t) / h;
        const double b = (t - t_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

private:
    std::vector<double> t_, y_, m_;
};

} // namespace detail

inline TimeSeries impute_spline(const MaskedSeries& masked) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < masked.base.length(); ++i) {
        if (masked.base.values[i]) {
            t.push_back(static_cast<double>(i));
            y.push_back(*masked.base.values[i]);
        }
    }
    if (t.size() < 4) {
        log::warn("series '%s': fewer than 4 present points, spline falls back to linear",
                  masked.base.id.c_str());
        return impute_linear(masked);
    }

    const detail::NaturalCubicSpline spline(std::move(t), std::move(y));
    std::vector<double> fill(masked.gap.size);
    for (std::size_t m = 0; m < masked.gap.size; ++m)
        fill[m] = spline(static_cast<double>(masked.gap.start + m));

    TimeSeries out = detail::copy_base(masked);
    detail::fill_gap(out, masked.gap, fill);
    return out;
}

namespace detail {

struct KnnTraining {
    std::vector<std::vector<double>> windows;
    std::vector<double> targets;
};

inline KnnTraining knn_training_set(const TimeSeries& base, std::size_t window) {
    KnnTraining tr;
    const std::size_t L = base.length();
    for (std::size_t s = 0; s + window < L; ++s) {
        bool ok = true;
        for (std::size_t j = 0; j <= window; ++j)
            if (!base.values[s + j]) { ok = false; break; }
        if (!ok) continue;
        std::vector<double> w(window);
        for (std::size_t j = 0; j < window; ++j) w[j] = *base.values[s + j];
        tr.windows.push_back(std::move(w));
        tr.targets.push_back(*base.values[s + window]);
    }
    return tr;
}

inline double knn_predict(const KnnTraining& tr, const std::vector<double>& query, std::size_t k,
                          std::size_t exclude = std::numeric_limits<std::size_t>::max()) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(tr.windows.size());
    for (std::size_t i = 0; i < tr.windows.size(); ++i) {
        if (i == exclude) continue;
        double d = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j) {
            const double e = tr.windows[i][j] - query[j];
            d += e * e;
        }
        dist.emplace_back(d, i);
    }
    const std::size_t kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < kk; ++i) sum += tr.targets[dist[i].second];
    return sum / static_cast<double>(kk);
}

} // namespace detail

inline TimeSeries impute_knn(const MaskedSeries& masked, const BaselineMethod& method = {}) {
    const auto& gap = masked.gap;
    const std::size_t window = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(method.knn_window, 1)), gap.start);
    const auto tr = detail::knn_training_set(masked.base, window);
    if (tr.windows.empty()) throw DataError("KNN imputation found no complete training windows");

    std::size_t k;
    if (method.knn_k) {
        k = static_cast<std::size_t>(std::max(*method.knn_k, 1));
    } else {
        // leave-one-out grid search, first minimum wins
        static constexpr std::size_t kGrid[] = {1, 3, 5, 7};
        double best_err = std::numeric_limits<double>::infinity();
        k = 1;
        for (std::size_t cand : kGrid) {
            if (tr.windows.size() < 2) break;
            double err = 0.0;
            for (std::size_t i = 0; i < tr.windows.size(); ++i) {
                const double pred = detail::knn_predict(tr, tr.windows[i], cand, i);
                const double e = pred - tr.targets[i];
                err += e * e;
            }
            if (err < best_err) {
                best_err = err;
                k = cand;
            }
        }
    }

    TimeSeries out = detail::copy_base(masked);
    for (std::size_t m = 0; m < gap.size; ++m) {
        const std::size_t pos = gap.start + m;
        std::vector<double> query(window);
        for (std::size_t j = 0; j < window; ++j) query[j] = *out.values[pos - window + j];
        out.values[pos] = detail::knn_predict(tr, query, k);
    }
    return out;
}

inline TimeSeries impute_arima(const MaskedSeries& masked, const BaselineMethod& method = {}) {
    const auto& gap = masked.gap;
    const std::size_t prefix_len = gap.start;
    if (prefix_len < 10) throw DataError("ARIMA imputation needs at least 10 observations before the gap");

    std::vector<double> prefix(prefix_len);
    for (std::size_t i = 0; i < prefix_len; ++i) prefix[i] = *masked.base.values[i];

    // d in {0,1} by the ADF test when the prefix is long enough for it
    int d = 0;
    if (prefix_len >= 20 && !adf_is_stationary(std::span<const double>(prefix))) d = 1;

    std::vector<double> z;
    if (d == 0) {
        z = prefix;
    } else {
        z.resize(prefix_len - 1);
        for (std::size_t i = 0; i + 1 < prefix_len; ++i) z[i] = prefix[i + 1] - prefix[i];
    }

    const std::size_t n = z.size();
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);

    std::vector<double> forecast_z(gap.size, mean);
    if (var > 1e-20 * (mean * mean + 1.0)) {
        const auto max_order = std::min<std::size_t>(static_cast<std::size_t>(std::max(method.arima_max_p, 0)), n - 2);
        std::vector<double> r(max_order + 1, 0.0);
        for (std::size_t lag = 0; lag <= max_order; ++lag) {
            double s = 0.0;
            for (std::size_t t = 0; t + lag < n; ++t) s += z[t] * z[t + lag];
            r[lag] = s / static_cast<double>(n);
        }

        // AIC over AR orders 0..max_order via one Levinson-Durbin sweep per order
        double best_aic = std::numeric_limits<double>::infinity();
        std::vector<double> best_phi;
        for (std::size_t q = 0; q <= max_order; ++q) {
            const auto sol = detail::levinson_durbin(r, q);
            const double s2 = std::max(sol.variance, 1e-300);
            const double aic = static_cast<double>(n) * std::log(s2) + 2.0 * static_cast<double>(q);
            if (aic < best_aic) {
                best_aic = aic;
                best_phi = sol.phi;
            }
        }

        std::vector<double> hist = z;
        const std::size_t order = best_phi.empty() ? 0 : best_phi.size() - 1;
        for (std::size_t m = 0; m < gap.size; ++m) {
            double pred = 0.0;
            for (std::size_t j = 1; j <= order; ++j) pred += best_phi[j] * hist[hist.size() - j];
            forecast_z[m] = pred;
            hist.push_back(pred);
        }
    }

    std::vector<double> fill(gap.size);
    if (d == 0) {
        fill = forecast_z;
    } else {
        double level = prefix.back();
        for (std::size_t m = 0; m < gap.size; ++m) {
            level += forecast_z[m];
            fill[m] = level;
        }
    }

    TimeSeries out = detail::copy_base(masked);
    detail::fill_gap(out, gap, fill);
    return out;
}

inline TimeSeries impute_baseline(const MaskedSeries& masked, const BaselineMethod& method) {
    switch (method.kind) {
        case BaselineKind::mean:
        case BaselineKind::median: return impute_constant(masked, method.kind);
        case BaselineKind::locf: return impute_carry(masked, CarryDirection::forward);
        case BaselineKind::nocb: return impute_carry(masked, CarryDirection::backward);
        case BaselineKind::linear: return impute_linear(masked);
        case BaselineKind::spline: return impute_spline(masked);
        case BaselineKind::knn: return impute_knn(masked, method);
        case BaselineKind::arima: return impute_arima(masked, method);
    }
    throw ConfigError("unknown baseline method");
}

} // namespace gapfill
