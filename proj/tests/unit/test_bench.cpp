#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "../support/synthetic.hpp"
#include "gapfill/bench.hpp"

using namespace gapfill;

namespace {

std::vector<TimeSeries> small_dataset(std::size_t n) {
    auto ds = testsupport::m3_like_dataset(n, 500);
    for (auto& ts : ds)
        if (ts.length() > 80) ts.values.resize(80); // keep unit runs quick
    return ds;
}

BenchmarkConfig fast_config() {
    BenchmarkConfig cfg;
    cfg.gap_sizes = {5, 10};
    cfg.methods = {Method::mean, Method::median, Method::locf, Method::nocb};
    return cfg;
}

} // namespace

TEST_CASE("run_benchmark emits one row per series/gap/method", "[bench]") {
    const auto ds = small_dataset(3);
    auto cfg = fast_config();
    const auto report = run_benchmark(ds, cfg);
    CHECK(report.rows.size() == 3 * 2 * 4);

    std::map<std::tuple<std::string, Method, std::size_t>, int> seen;
    for (const auto& r : report.rows) ++seen[{r.series_id, r.method, r.gap_size}];
    for (const auto& [key, count] : seen) CHECK(count == 1);
}

TEST_CASE("aggregates are recomputable from rows", "[bench]") {
    const auto ds = small_dataset(4);
    auto cfg = fast_config();
    const auto report = run_benchmark(ds, cfg);
    for (const auto& agg : report.aggregates) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : report.rows) {
            if (r.method != agg.method || r.gap_size != agg.gap_size || r.failed) continue;
            if (agg.group == AggregateGroup::stationary && !r.stationary) continue;
            if (agg.group == AggregateGroup::nonstationary && r.stationary) continue;
            sum += r.metrics.smape;
            ++n;
        }
        REQUIRE(n == agg.count);
        REQUIRE(std::abs(agg.mean_metrics.smape - sum / static_cast<double>(n)) <= 1e-12);
    }
}

TEST_CASE("csv report round-trips a row", "[bench]") {
    const auto ds = small_dataset(2);
    auto cfg = fast_config();
    const auto report = run_benchmark(ds, cfg);
    std::ostringstream os;
    emit_report(report, ReportFormat::csv, os);

    std::istringstream in(os.str());
    std::string header, first;
    std::getline(in, header);
    CHECK(header == "series_id,method,side,gap_size,smape,rmse,mae,sim,seconds,stationary");
    std::getline(in, first);

    std::vector<std::string> fields;
    std::string tok;
    std::istringstream fs(first);
    while (std::getline(fs, tok, ',')) fields.push_back(tok);
    REQUIRE(fields.size() == 10);
    const auto& r0 = report.rows.front();
    CHECK(fields[0] == r0.series_id);
    CHECK(fields[1] == to_string(r0.method));
    CHECK(std::stoul(fields[3]) == r0.gap_size);
    CHECK(std::stod(fields[4]) == r0.metrics.smape);
    CHECK(std::stod(fields[5]) == r0.metrics.rmse);
    CHECK(std::stod(fields[6]) == r0.metrics.mae);
    CHECK(std::stod(fields[7]) == r0.metrics.sim);
    CHECK(fields[9] == (r0.stationary ? "true" : "false"));
}

TEST_CASE("json and csv carry identical numbers", "[bench]") {
    const auto ds = small_dataset(2);
    auto cfg = fast_config();
    const auto report = run_benchmark(ds, cfg);

    std::ostringstream js;
    emit_report(report, ReportFormat::json, js);
    const auto j = nlohmann::json::parse(js.str());
    REQUIRE(j["rows"].size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        const auto& jr = j["rows"][i];
        CHECK(jr["series_id"] == row.series_id);
        CHECK(jr["method"] == to_string(row.method));
        CHECK(jr["gap_size"] == row.gap_size);
        CHECK(jr["smape"].get<double>() == row.metrics.smape);
        CHECK(jr["sim"].get<double>() == row.metrics.sim);
    }
    REQUIRE(j["aggregates"].size() == report.aggregates.size());
}

TEST_CASE("reports are identical across runs and job counts except timings", "[bench]") {
    const auto ds = small_dataset(3);
    auto cfg = fast_config();
    const auto a = run_benchmark(ds, cfg);
    cfg.jobs = 3;
    const auto b = run_benchmark(ds, cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].series_id == b.rows[i].series_id);
        CHECK(a.rows[i].method == b.rows[i].method);
        CHECK(a.rows[i].gap_size == b.rows[i].gap_size);
        CHECK(a.rows[i].metrics.smape == b.rows[i].metrics.smape);
        CHECK(a.rows[i].metrics.rmse == b.rows[i].metrics.rmse);
        CHECK(a.rows[i].metrics.mae == b.rows[i].metrics.mae);
        CHECK(a.rows[i].metrics.sim == b.rows[i].metrics.sim);
        CHECK(a.rows[i].stationary == b.rows[i].stationary);
    }
}

TEST_CASE("keep-imputations sidecar reproduces row metrics", "[bench]") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "gapfill_sidecar_test";
    fs::remove_all(dir);

    const auto ds = small_dataset(1);
    BenchmarkConfig cfg;
    cfg.gap_sizes = {5};
    cfg.methods = {Method::linear};
    cfg.keep_imputations_dir = dir.string();
    const auto report = run_benchmark(ds, cfg);
    REQUIRE(report.rows.size() == 1);
    const auto& row = report.rows.front();

    std::ifstream in(dir / (row.series_id + "_linear_gap5.csv"));
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "position,truth,imputed");
    std::vector<double> truth, imputed;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string pos, t, v;
        std::getline(ls, pos, ',');
        std::getline(ls, t, ',');
        std::getline(ls, v, ',');
        truth.push_back(std::stod(t));
        imputed.push_back(std::stod(v));
    }
    REQUIRE(truth.size() == 5);
    CHECK(smape(truth, imputed) == row.metrics.smape);
    CHECK(rmse(truth, imputed) == row.metrics.rmse);
    CHECK(mae(truth, imputed) == row.metrics.mae);
    fs::remove_all(dir);
}

TEST_CASE("plot data lists one smape per successful row", "[bench]") {
    const auto ds = small_dataset(2);
    auto cfg = fast_config();
    const auto report = run_benchmark(ds, cfg);
    std::ostringstream os;
    emit_plot_data(report, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,side,gap_size,series_id,smape");
    std::size_t count = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++count;
    CHECK(count == report.rows.size());
}

TEST_CASE("selection bounds collapse for a single candidate", "[bench]") {
    CandidateMatrix cm;
    cm.family_k = 1;
    cm.candidates.push_back(Candidate{0, {0.2, 0.4}, 0.5});
    const std::vector<double> truth{20.0, 40.0};
    const auto b = selection_bounds({cm}, ScaleParams{0.0, 100.0}, truth);
    CHECK(b.worst == b.best);
    CHECK(b.best == smape(truth, std::vector<double>{20.0, 40.0}));
}

TEST_CASE("benchmark config validation", "[bench]") {
    const auto ds = small_dataset(2);
    BenchmarkConfig cfg;
    cfg.gap_sizes = {};
    CHECK_THROWS_AS(run_benchmark(ds, cfg), ConfigError);

    cfg = BenchmarkConfig{};
    cfg.gap_sizes = {69};
    CHECK_THROWS_AS(run_benchmark(ds, cfg), ConfigError);

    cfg = BenchmarkConfig{};
    cfg.min_length = 500; // nothing qualifies
    cfg.gap_sizes = {5};
    CHECK_THROWS_AS(run_benchmark(ds, cfg), ConfigError);
}

TEST_CASE("short and holey series are skipped, not fatal", "[bench]") {
    auto ds = small_dataset(2);
    ds.push_back(TimeSeries::from_dense("short", Period::other, std::vector<double>(10, 1.0)));
    auto holey = ds[0];
    holey.id = "holey";
    holey.values[5].reset();
    ds.push_back(holey);

    auto cfg = fast_config();
    const auto report = run_benchmark(ds, cfg);
    for (const auto& r : report.rows) {
        CHECK(r.series_id != "short");
        CHECK(r.series_id != "holey");
    }
}
