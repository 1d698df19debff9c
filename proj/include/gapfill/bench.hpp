#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gapfill/baselines.hpp"
#include "gapfill/csv.hpp"
#include "gapfill/error.hpp"
#include "gapfill/hinge.hpp"
#include "gapfill/log.hpp"
#include "gapfill/metrics.hpp"
#include "gapfill/series.hpp"

namespace gapfill {

enum class Method {
    hinge_left, hinge_right, mean, median, locf, nocb, linear, spline, knn, arima
};

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> m = {
        Method::hinge_left, Method::hinge_right, Method::mean, Method::median, Method::locf,
        Method::nocb,       Method::linear,      Method::spline, Method::knn,  Method::arima};
    return m;
}

inline const char* to_string(Method m) {
    switch (m) {
        case Method::hinge_left: return "hinge-left";
        case Method::hinge_right: return "hinge-right";
        case Method::mean: return "mean";
        case Method::median: return "median";
        case Method::locf: return "locf";
        case Method::nocb: return "nocb";
        case Method::linear: return "linear";
        case Method::spline: return "spline";
        case Method::knn: return "knn";
        case Method::arima: return "arima";
    }
    return "?";
}

inline std::optional<Method> method_from_string(const std::string& name) {
    for (Method m : all_methods())
        if (name == to_string(m)) return m;
    return std::nullopt;
}

inline bool is_hinge(Method m) { return m == Method::hinge_left || m == Method::hinge_right; }

enum class ReportFormat { csv, json };

struct BenchmarkConfig {
    std::vector<std::size_t> gap_sizes = {5, 10, 20};
    std::vector<Method> methods = all_methods();
    std::size_t min_length = 70;
    std::optional<std::size_t> gap_start; // default: centered
    unsigned seed = 0;                    // reserved; the pipeline is deterministic
    PipelineConfig pipeline{};
    BaselineMethod baseline{};
    std::size_t jobs = 1;
    std::string keep_imputations_dir{};

    void validate() const {
        if (gap_sizes.empty()) throw ConfigError("at least one gap size is required");
        if (methods.empty()) throw ConfigError("at least one method is required");
        if (min_length < 3) throw ConfigError("min length must be at least 3");
        for (std::size_t t : gap_sizes)
            if (t == 0 || t >= min_length - 1)
                throw ConfigError("gap size " + std::to_string(t) + " must lie in [1, min_length-2]");
    }
};

struct BenchmarkRow {
    std::string series_id;
    Method method = Method::mean;
    std::size_t gap_size = 0;
    MetricRecord metrics{};
    double seconds = 0.0;
    bool stationary = false;
    bool failed = false;
    std::string error;
    int chosen_family = 0;      // hinge only
    std::size_t chosen_row = 0; // hinge only
};

struct SelectionRow {
    std::string series_id;
    HingeSide side = HingeSide::left;
    std::size_t gap_size = 0;
    double worst = 0.0;
    double selected = 0.0;
    double best = 0.0;
};

enum class AggregateGroup { all, stationary, nonstationary };

inline const char* to_string(AggregateGroup g) {
    switch (g) {
        case AggregateGroup::all: return "all";
        case AggregateGroup::stationary: return "stationary";
        default: return "nonstationary";
    }
}

struct AggregateRow {
    Method method = Method::mean;
    std::size_t gap_size = 0;
    AggregateGroup group = AggregateGroup::all;
    std::size_t count = 0;
    MetricRecord mean_metrics{};
    double sec_min = 0.0, sec_mean = 0.0, sec_max = 0.0;
};

struct SelectionAggregate {
    std::size_t gap_size = 0;
    std::size_t count = 0;
    double worst = 0.0, selected = 0.0, best = 0.0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    std::vector<SelectionRow> selection;
    std::vector<AggregateRow> aggregates;
    std::vector<SelectionAggregate> selection_aggregates;
};

struct SelectionBounds {
    double worst = 0.0;
    double best = 0.0;
};

/// Oracle bracket: max/min gap sMAPE over every candidate in the pool.
inline SelectionBounds selection_bounds(const std::vector<CandidateMatrix>& pool,
                                        const ScaleParams& params, std::span<const double> truth) {
    SelectionBounds bounds{0.0, std::numeric_limits<double>::infinity()};
    bounds.worst = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& set : pool) {
        for (const auto& cand : set.candidates) {
            const auto estimates = minmax_unscale(cand.gap_estimates, params);
            const double s = smape(truth, estimates);
            bounds.worst = std::max(bounds.worst, s);
            bounds.best = std::min(bounds.best, s);
            any = true;
        }
    }
    if (!any) throw DataError("selection bounds need a nonempty candidate pool");
    return bounds;
}

namespace detail {

inline std::vector<double> gap_values(const TimeSeries& ts, const GapSpec& gap) {
    std::vector<double> out(gap.size);
    for (std::size_t m = 0; m < gap.size; ++m) out[m] = *ts.values[gap.start + m];
    return out;
}

inline double series_range(const TimeSeries& ts) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& v : ts.values) {
        if (!v) continue;
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
    }
    return hi - lo;
}

inline void write_imputation_sidecar(const std::string& dir, const BenchmarkRow& row,
                                     const GapSpec& gap, std::span<const double> truth,
                                     std::span<const double> imputed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string name = row.series_id + "_" + to_string(row.method) + "_gap" +
                             std::to_string(row.gap_size) + ".csv";
    std::ofstream os(fs::path(dir) / name);
    os << "position,truth,imputed\n";
    for (std::size_t m = 0; m < truth.size(); ++m)
        os << gap.start + m << ',' << format_number(truth[m]) << ',' << format_number(imputed[m])
           << '\n';
}

inline int method_order(Method m) {
    int i = 0;
    for (Method cand : all_methods()) {
        if (cand == m) return i;
        ++i;
    }
    return i;
}

} // namespace detail

/// Runs every (eligible series, gap size, method) combination: inject a centered
/// gap, impute, score against the held-out truth over the gap positions.
inline BenchmarkReport run_benchmark(const std::vector<TimeSeries>& dataset,
                                     const BenchmarkConfig& cfg) {
    cfg.validate();

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& ts = dataset[i];
        if (ts.length() < cfg.min_length) {
            log::info("series '%s' skipped: length %zu below minimum %zu", ts.id.c_str(), ts.length(),
                      cfg.min_length);
            continue;
        }
        if (!ts.complete()) {
            log::warn("series '%s' skipped: benchmark input must have no missing values",
                      ts.id.c_str());
            continue;
        }
        eligible.push_back(i);
    }
    if (eligible.empty()) throw ConfigError("no series meets the benchmark requirements");

    struct Task {
        std::size_t series_index;
        std::size_t gap_size;
    };
    std::vector<Task> tasks;
    for (std::size_t si : eligible)
        for (std::size_t t : cfg.gap_sizes) tasks.push_back({si, t});

    struct TaskResult {
        std::vector<BenchmarkRow> rows;
        std::vector<SelectionRow> selection;
    };
    std::vector<TaskResult> results(tasks.size());

    // per-series stationarity classification (Table-3-style split)
    std::map<std::size_t, bool> stationary;
    for (std::size_t si : eligible) {
        bool flag = false;
        try {
            flag = adf_is_stationary(dataset[si]);
        } catch (const std::exception& e) {
            log::warn("series '%s': ADF classification failed (%s); grouped as non-stationary",
                      dataset[si].id.c_str(), e.what());
        }
        stationary[si] = flag;
    }

    auto run_task = [&](std::size_t ti) {
        const Task& task = tasks[ti];
        const TimeSeries& series = dataset[task.series_index];
        TaskResult& out = results[ti];

        GapSpec gap;
        gap.size = task.gap_size;
        gap.start = cfg.gap_start ? *cfg.gap_start : (series.length() - task.gap_size) / 2;
        MaskedSeries masked;
        try {
            masked = inject_gap(series, gap);
        } catch (const std::exception& e) {
            log::warn("series '%s', gap %zu: %s", series.id.c_str(), task.gap_size, e.what());
            return;
        }
        const double range = detail::series_range(series);

        for (Method m : cfg.methods) {
            BenchmarkRow row;
            row.series_id = series.id;
            row.method = m;
            row.gap_size = task.gap_size;
            row.stationary = stationary[task.series_index];

            const auto t0 = std::chrono::steady_clock::now();
            try {
                TimeSeries imputed;
                if (is_hinge(m)) {
                    const auto side = m == Method::hinge_left ? HingeSide::left : HingeSide::right;
                    const auto result = hinge_fm2i(masked, side, cfg.pipeline);
                    imputed = result.imputed_series;
                    row.chosen_family = result.chosen.family_k;
                    row.chosen_row = result.chosen.row;

                    const auto bounds =
                        selection_bounds(result.per_family_candidates, result.scale, masked.removed);
                    const auto estimates = detail::gap_values(imputed, gap);
                    out.selection.push_back(SelectionRow{series.id, side, task.gap_size, bounds.worst,
                                                         smape(masked.removed, estimates),
                                                         bounds.best});
                } else {
                    BaselineMethod bm = cfg.baseline;
                    bm.kind = [&] {
                        switch (m) {
                            case Method::mean: return BaselineKind::mean;
                            case Method::median: return BaselineKind::median;
                            case Method::locf: return BaselineKind::locf;
                            case Method::nocb: return BaselineKind::nocb;
                            case Method::linear: return BaselineKind::linear;
                            case Method::spline: return BaselineKind::spline;
                            case Method::knn: return BaselineKind::knn;
                            default: return BaselineKind::arima;
                        }
                    }();
                    imputed = impute_baseline(masked, bm);
                }
                row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

                const auto estimates = detail::gap_values(imputed, gap);
                row.metrics = evaluate(masked.removed, estimates, range);
                if (!cfg.keep_imputations_dir.empty())
                    detail::write_imputation_sidecar(cfg.keep_imputations_dir, row, gap, masked.removed,
                                                     estimates);
            } catch (const std::exception& e) {
                row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                row.failed = true;
                row.error = e.what();
                log::warn("series '%s', gap %zu, %s: %s", series.id.c_str(), task.gap_size,
                          to_string(m), e.what());
            }
            out.rows.push_back(std::move(row));
        }
    };

    const std::size_t jobs = std::max<std::size_t>(cfg.jobs, 1);
    if (jobs == 1 || tasks.size() <= 1) {
        for (std::size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min(jobs, tasks.size());
        pool.reserve(n_threads);
        for (std::size_t w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t ti = next.fetch_add(1);
                    if (ti >= tasks.size()) return;
                    run_task(ti);
                }
            });
        for (auto& th : pool) th.join();
    }

    BenchmarkReport report;
    for (auto& tr : results) {
        for (auto& r : tr.rows) report.rows.push_back(std::move(r));
        for (auto& s : tr.selection) report.selection.push_back(std::move(s));
    }
    std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
        if (a.series_id != b.series_id) return a.series_id < b.series_id;
        const int ma = detail::method_order(a.method), mb = detail::method_order(b.method);
        if (ma != mb) return ma < mb;
        return a.gap_size < b.gap_size;
    });
    std::stable_sort(report.selection.begin(), report.selection.end(), [](const auto& a, const auto& b) {
        if (a.series_id != b.series_id) return a.series_id < b.series_id;
        if (a.side != b.side) return a.side == HingeSide::left;
        return a.gap_size < b.gap_size;
    });

    // aggregates per (method, gap size) and per stationarity group
    for (Method m : cfg.methods) {
        for (std::size_t t : cfg.gap_sizes) {
            for (AggregateGroup g :
                 {AggregateGroup::all, AggregateGroup::stationary, AggregateGroup::nonstationary}) {
                AggregateRow agg;
                agg.method = m;
                agg.gap_size = t;
                agg.group = g;
                agg.sec_min = std::numeric_limits<double>::infinity();
                double sec_sum = 0.0;
                for (const auto& row : report.rows) {
                    if (row.method != m || row.gap_size != t || row.failed) continue;
                    if (g == AggregateGroup::stationary && !row.stationary) continue;
                    if (g == AggregateGroup::nonstationary && row.stationary) continue;
                    ++agg.count;
                    agg.mean_metrics.smape += row.metrics.smape;
                    agg.mean_metrics.rmse += row.metrics.rmse;
                    agg.mean_metrics.mae += row.metrics.mae;
                    agg.mean_metrics.sim += row.metrics.sim;
                    agg.sec_min = std::min(agg.sec_min, row.seconds);
                    agg.sec_max = std::max(agg.sec_max, row.seconds);
                    sec_sum += row.seconds;
                }
                if (agg.count == 0) continue;
                const auto n = static_cast<double>(agg.count);
                agg.mean_metrics.smape /= n;
                agg.mean_metrics.rmse /= n;
                agg.mean_metrics.mae /= n;
                agg.mean_metrics.sim /= n;
                agg.sec_mean = sec_sum / n;
                report.aggregates.push_back(agg);
            }
        }
    }
    for (std::size_t t : cfg.gap_sizes) {
        SelectionAggregate sa;
        sa.gap_size = t;
        for (const auto& s : report.selection) {
            if (s.gap_size != t) continue;
            ++sa.count;
            sa.worst += s.worst;
            sa.selected += s.selected;
            sa.best += s.best;
        }
        if (sa.count == 0) continue;
        const auto n = static_cast<double>(sa.count);
        sa.worst /= n;
        sa.selected /= n;
        sa.best /= n;
        report.selection_aggregates.push_back(sa);
    }
    return report;
}

namespace detail {

inline std::string seconds_str(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

inline const char* side_str(Method m) {
    if (m == Method::hinge_left) return "left";
    if (m == Method::hinge_right) return "right";
    return "";
}

} // namespace detail

inline void emit_report(const BenchmarkReport& report, ReportFormat format, std::ostream& os) {
    if (format == ReportFormat::csv) {
        os << "series_id,method,side,gap_size,smape,rmse,mae,sim,seconds,stationary\n";
        for (const auto& r : report.rows) {
            os << r.series_id << ',' << to_string(r.method) << ',' << detail::side_str(r.method) << ','
               << r.gap_size << ',';
            if (r.failed) {
                os << ",,,";
            } else {
                os << detail::format_number(r.metrics.smape) << ','
                   << detail::format_number(r.metrics.rmse) << ','
                   << detail::format_number(r.metrics.mae) << ','
                   << detail::format_number(r.metrics.sim);
            }
            os << ',' << detail::seconds_str(r.seconds) << ',' << (r.stationary ? "true" : "false")
               << '\n';
        }
        os << "\n# aggregates\n";
        os << "method,side,gap_size,group,count,smape,rmse,mae,sim,sec_min,sec_mean,sec_max\n";
        for (const auto& a : report.aggregates) {
            os << to_string(a.method) << ',' << detail::side_str(a.method) << ',' << a.gap_size << ','
               << to_string(a.group) << ',' << a.count << ','
               << detail::format_number(a.mean_metrics.smape) << ','
               << detail::format_number(a.mean_metrics.rmse) << ','
               << detail::format_number(a.mean_metrics.mae) << ','
               << detail::format_number(a.mean_metrics.sim) << ',' << detail::seconds_str(a.sec_min)
               << ',' << detail::seconds_str(a.sec_mean) << ',' << detail::seconds_str(a.sec_max)
               << '\n';
        }
        os << "\n# selection_bounds\n";
        os << "series_id,side,gap_size,worst_smape,hinge_smape,best_smape\n";
        for (const auto& s : report.selection) {
            os << s.series_id << ',' << to_string(s.side) << ',' << s.gap_size << ','
               << detail::format_number(s.worst) << ',' << detail::format_number(s.selected) << ','
               << detail::format_number(s.best) << '\n';
        }
        for (const auto& sa : report.selection_aggregates) {
            os << "(mean)," << ',' << sa.gap_size << ',' << detail::format_number(sa.worst) << ','
               << detail::format_number(sa.selected) << ',' << detail::format_number(sa.best) << '\n';
        }
        return;
    }

    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["series_id"] = r.series_id;
        row["method"] = to_string(r.method);
        row["side"] = detail::side_str(r.method);
        row["gap_size"] = r.gap_size;
        if (r.failed) {
            row["failed"] = true;
            row["error"] = r.error;
        } else {
            row["smape"] = r.metrics.smape;
            row["rmse"] = r.metrics.rmse;
            row["mae"] = r.metrics.mae;
            row["sim"] = r.metrics.sim;
        }
        row["seconds"] = r.seconds;
        row["stationary"] = r.stationary;
        if (is_hinge(r.method) && !r.failed) {
            row["chosen_family"] = r.chosen_family;
            row["chosen_row"] = r.chosen_row;
        }
        j["rows"].push_back(std::move(row));
    }
    j["aggregates"] = nlohmann::json::array();
    for (const auto& a : report.aggregates) {
        j["aggregates"].push_back({{"method", to_string(a.method)},
                                   {"side", detail::side_str(a.method)},
                                   {"gap_size", a.gap_size},
                                   {"group", to_string(a.group)},
                                   {"count", a.count},
                                   {"smape", a.mean_metrics.smape},
                                   {"rmse", a.mean_metrics.rmse},
                                   {"mae", a.mean_metrics.mae},
                                   {"sim", a.mean_metrics.sim},
                                   {"sec_min", a.sec_min},
                                   {"sec_mean", a.sec_mean},
                                   {"sec_max", a.sec_max}});
    }
    j["selection_bounds"] = nlohmann::json::array();
    for (const auto& s : report.selection) {
        j["selection_bounds"].push_back({{"series_id", s.series_id},
                                         {"side", to_string(s.side)},
                                         {"gap_size", s.gap_size},
                                         {"worst_smape", s.worst},
                                         {"hinge_smape", s.selected},
                                         {"best_smape", s.best}});
    }
    j["selection_means"] = nlohmann::json::array();
    for (const auto& sa : report.selection_aggregates) {
        j["selection_means"].push_back({{"gap_size", sa.gap_size},
                                        {"count", sa.count},
                                        {"worst_smape", sa.worst},
                                        {"hinge_smape", sa.selected},
                                        {"best_smape", sa.best}});
    }
    os << j.dump(2) << '\n';
}

/// Long-form per-run sMAPE table for external box-plot rendering.
inline void emit_plot_data(const BenchmarkReport& report, std::ostream& os) {
    os << "method,side,gap_size,series_id,smape\n";
    for (const auto& r : report.rows) {
        if (r.failed) continue;
        os << to_string(r.method) << ',' << detail::side_str(r.method) << ',' << r.gap_size << ','
           << r.series_id << ',' << detail::format_number(r.metrics.smape) << '\n';
    }
}

} // namespace gapfill
