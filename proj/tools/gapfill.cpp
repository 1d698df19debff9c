#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapfill/bench.hpp"
#include "gapfill/csv.hpp"
#include "gapfill/error.hpp"
#include "gapfill/hinge.hpp"
#include "gapfill/log.hpp"
#include "gapfill/series.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

gapfill::CsvLayout layout_from(const std::string& name) {
    if (name == "rows") return gapfill::CsvLayout::one_series_per_row;
    if (name == "columns") return gapfill::CsvLayout::two_column;
    throw gapfill::ConfigError("unknown layout '" + name + "' (expected rows or columns)");
}

std::vector<gapfill::TimeSeries> load_input(const std::string& path, const std::string& layout) {
    std::ifstream in(path);
    if (!in) throw gapfill::DataError("cannot open input file '" + path + "'");
    return gapfill::load_csv(in, layout_from(layout));
}

void write_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw gapfill::DataError("cannot open output file '" + path + "'");
    writer(os);
}

std::vector<std::size_t> parse_gap_sizes(const std::string& arg) {
    std::vector<std::size_t> out;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            out.push_back(std::stoul(tok));
        } catch (const std::exception&) {
            throw gapfill::ConfigError("bad gap size '" + tok + "'");
        }
    }
    return out;
}

std::vector<gapfill::Method> parse_methods(const std::string& arg) {
    if (arg == "all") return gapfill::all_methods();
    std::vector<gapfill::Method> out;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        const auto m = gapfill::method_from_string(tok);
        if (!m) throw gapfill::ConfigError("unknown method '" + tok + "'");
        out.push_back(*m);
    }
    return out;
}

struct ImputeOptions {
    std::string input, output, layout = "rows", method = "hinge-left", dump_images;
    std::optional<std::size_t> gap_start;
    std::optional<std::size_t> gap_size;
    int patch_size = 9;
    std::size_t rows = gapfill::kDefaultRows;
};

int run_impute(const ImputeOptions& opt) {
    using namespace gapfill;
    const auto method = method_from_string(opt.method);
    if (!method) throw ConfigError("unknown method '" + opt.method + "'");

    PipelineConfig pipeline;
    pipeline.rows = opt.rows;
    pipeline.inpaint.patch_size = opt.patch_size;
    pipeline.inpaint.debug_dump_dir = opt.dump_images;

    auto dataset = load_input(opt.input, opt.layout);
    std::vector<TimeSeries> imputed;
    imputed.reserve(dataset.size());

    for (const auto& series : dataset) {
        MaskedSeries masked;
        if (series.complete()) {
            if (!opt.gap_size)
                throw ConfigError("series '" + series.id +
                                  "' has no missing values; provide --gap-size to simulate a gap");
            GapSpec gap;
            gap.size = *opt.gap_size;
            gap.start = opt.gap_start ? *opt.gap_start : (series.length() - gap.size) / 2;
            masked = inject_gap(series, gap);
        } else {
            masked = adopt_gap(series);
            if (opt.gap_size && *opt.gap_size != masked.gap.size)
                throw ConfigError("series '" + series.id + "' carries a gap of size " +
                                  std::to_string(masked.gap.size) + ", not " +
                                  std::to_string(*opt.gap_size));
            if (opt.gap_start && *opt.gap_start != masked.gap.start)
                throw ConfigError("series '" + series.id + "' carries a gap starting at " +
                                  std::to_string(masked.gap.start) + ", not " +
                                  std::to_string(*opt.gap_start));
        }

        TimeSeries result;
        if (is_hinge(*method)) {
            const auto side = *method == Method::hinge_left ? HingeSide::left : HingeSide::right;
            auto res = hinge_fm2i(masked, side, pipeline);
            log::info("series '%s': chose family %d row %zu (hinge error %.6g)",
                      series.id.c_str(), res.chosen.family_k, res.chosen.row,
                      res.chosen.hinge_error);
            result = std::move(res.imputed_series);
        } else {
            BaselineMethod bm;
            switch (*method) {
                case Method::mean: bm.kind = BaselineKind::mean; break;
                case Method::median: bm.kind = BaselineKind::median; break;
                case Method::locf: bm.kind = BaselineKind::locf; break;
                case Method::nocb: bm.kind = BaselineKind::nocb; break;
                case Method::linear: bm.kind = BaselineKind::linear; break;
                case Method::spline: bm.kind = BaselineKind::spline; break;
                case Method::knn: bm.kind = BaselineKind::knn; break;
                default: bm.kind = BaselineKind::arima; break;
            }
            result = impute_baseline(masked, bm);
        }

        if (!masked.removed.empty()) {
            std::vector<double> estimates(masked.gap.size);
            for (std::size_t m = 0; m < masked.gap.size; ++m)
                estimates[m] = *result.values[masked.gap.start + m];
            const double range = [&] {
                double lo = *series.values[0], hi = lo;
                for (const auto& v : series.values) {
                    lo = std::min(lo, *v);
                    hi = std::max(hi, *v);
                }
                return hi - lo;
            }();
            const auto rec = evaluate(masked.removed, estimates, range);
            log::info("series '%s': smape=%.4f rmse=%.6g mae=%.6g sim=%.4f", series.id.c_str(),
                      rec.smape, rec.rmse, rec.mae, rec.sim);
        }
        imputed.push_back(std::move(result));
    }

    write_output(opt.output, [&](std::ostream& os) { write_csv(os, imputed, layout_from(opt.layout)); });
    return kExitOk;
}

struct BenchOptions {
    std::string input, output, layout = "rows", gap_sizes = "5,10,20", methods = "all",
                format = "csv", keep_imputations, plot_data;
    std::optional<std::size_t> gap_start;
    std::size_t min_length = 70;
    int patch_size = 9;
    std::size_t rows = gapfill::kDefaultRows;
    std::size_t jobs = 1;
    unsigned seed = 0;
};

int run_bench(const BenchOptions& opt) {
    using namespace gapfill;
    BenchmarkConfig cfg;
    cfg.gap_sizes = parse_gap_sizes(opt.gap_sizes);
    cfg.methods = parse_methods(opt.methods);
    cfg.min_length = opt.min_length;
    cfg.gap_start = opt.gap_start;
    cfg.seed = opt.seed;
    cfg.jobs = opt.jobs;
    cfg.keep_imputations_dir = opt.keep_imputations;
    cfg.pipeline.rows = opt.rows;
    cfg.pipeline.inpaint.patch_size = opt.patch_size;

    ReportFormat format;
    if (opt.format == "csv") format = ReportFormat::csv;
    else if (opt.format == "json") format = ReportFormat::json;
    else throw ConfigError("unknown format '" + opt.format + "' (expected csv or json)");

    const auto dataset = load_input(opt.input, opt.layout);
    const auto report = run_benchmark(dataset, cfg);
    write_output(opt.output, [&](std::ostream& os) { emit_report(report, format, os); });
    if (!opt.plot_data.empty())
        write_output(opt.plot_data, [&](std::ostream& os) { emit_plot_data(report, os); });
    return kExitOk;
}

struct InjectOptions {
    std::string input, output, layout = "rows";
    std::size_t gap_size = 0;
    std::optional<std::size_t> gap_start;
};

int run_inject(const InjectOptions& opt) {
    using namespace gapfill;
    auto dataset = load_input(opt.input, opt.layout);
    std::vector<TimeSeries> masked;
    masked.reserve(dataset.size());
    for (const auto& series : dataset) {
        GapSpec gap;
        gap.size = opt.gap_size;
        gap.start = opt.gap_start ? *opt.gap_start : (series.length() - opt.gap_size) / 2;
        masked.push_back(inject_gap(series, gap).base);
    }
    write_output(opt.output, [&](std::ostream& os) { write_csv(os, masked, layout_from(opt.layout)); });
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gapfill: impute large gaps in univariate time series via image inpainting"};
    app.require_subcommand(1);

    ImputeOptions imp;
    auto* impute = app.add_subcommand("impute", "Impute one gap per series in a CSV file");
    impute->add_option("--input", imp.input, "input CSV")->required();
    impute->add_option("--output", imp.output, "output CSV ('-' for stdout)");
    impute->add_option("--layout", imp.layout, "rows | columns")->capture_default_str();
    impute->add_option("--method", imp.method,
                       "hinge-left|hinge-right|mean|median|locf|nocb|linear|spline|knn|arima")
        ->capture_default_str();
    impute->add_option("--gap-start", imp.gap_start, "gap start index (default: centered)");
    impute->add_option("--gap-size", imp.gap_size, "gap size when the input has no missing values");
    impute->add_option("--patch-size", imp.patch_size, "inpainting patch size")->capture_default_str();
    impute->add_option("--rows", imp.rows, "image height cap")->capture_default_str();
    impute->add_option("--dump-images", imp.dump_images, "dump per-family PPM images to this directory");

    BenchOptions ben;
    auto* bench = app.add_subcommand("bench", "Gap-injection benchmark across methods and gap sizes");
    bench->add_option("--input", ben.input, "dataset CSV")->required();
    bench->add_option("--output", ben.output, "report destination ('-' for stdout)");
    bench->add_option("--layout", ben.layout, "rows | columns")->capture_default_str();
    bench->add_option("--gap-sizes", ben.gap_sizes, "comma-separated gap sizes")->capture_default_str();
    bench->add_option("--methods", ben.methods, "'all' or a comma-separated method list")
        ->capture_default_str();
    bench->add_option("--format", ben.format, "csv | json")->capture_default_str();
    bench->add_option("--gap-start", ben.gap_start, "fixed gap start (default: centered)");
    bench->add_option("--min-length", ben.min_length, "minimum series length")->capture_default_str();
    bench->add_option("--patch-size", ben.patch_size, "inpainting patch size")->capture_default_str();
    bench->add_option("--rows", ben.rows, "image height cap")->capture_default_str();
    bench->add_option("--jobs", ben.jobs, "parallel series workers")->capture_default_str();
    bench->add_option("--seed", ben.seed, "reserved (pipeline is deterministic)");
    bench->add_option("--keep-imputations", ben.keep_imputations,
                      "write (truth, imputed) sidecar CSVs to this directory");
    bench->add_option("--emit-plot-data", ben.plot_data, "write long-form sMAPE CSV for box plots");

    InjectOptions inj;
    auto* inject = app.add_subcommand("inject", "Blank out a gap to prepare impute-mode inputs");
    inject->add_option("--input", inj.input, "input CSV")->required();
    inject->add_option("--output", inj.output, "output CSV ('-' for stdout)");
    inject->add_option("--layout", inj.layout, "rows | columns")->capture_default_str();
    inject->add_option("--gap-size", inj.gap_size, "gap size")->required();
    inject->add_option("--gap-start", inj.gap_start, "gap start index (default: centered)");

    try {
        app.parse(argc, argv);
        if (impute->parsed()) return run_impute(imp);
        if (bench->parsed()) return run_bench(ben);
        if (inject->parsed()) return run_inject(inj);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    } catch (const gapfill::ConfigError& e) {
        gapfill::log::error("%s", e.what());
        return kExitConfig;
    } catch (const gapfill::DataError& e) {
        gapfill::log::error("%s", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        gapfill::log::error("%s", e.what());
        return kExitData;
    }
}
