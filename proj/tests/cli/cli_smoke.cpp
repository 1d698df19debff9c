// End-to-end exercise of the gapfill CLI binary (path passed as argv[1]).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        std::cerr << "FAILED: " << what << '\n';
        ++failures;
    }
}

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_smoke <gapfill-binary>\n";
        return 1;
    }
    const std::string bin = argv[1];
    const fs::path dir = fs::temp_directory_path() / "gapfill_cli_smoke";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // deterministic sine+trend dataset, two series of length 80
    const fs::path input = dir / "data.csv";
    {
        std::ofstream os(input);
        for (int s = 0; s < 2; ++s) {
            os << "s" << s << ",monthly";
            for (int t = 0; t < 80; ++t) {
                const double v = 1000.0 + 5.0 * t + 120.0 * std::sin(0.5236 * t + s) + s * 40.0;
                os << ',' << v;
            }
            os << '\n';
        }
    }

    // inject: blank a centered gap
    const fs::path masked = dir / "masked.csv";
    expect(run(bin + " inject --input " + input.string() + " --gap-size 5 --output " +
               masked.string()) == 0,
           "inject exits 0");
    {
        const std::string text = slurp(masked);
        expect(text.find(",,,,,") != std::string::npos, "masked csv has 5 empty cells");
    }

    // impute the injected file (gap adopted from the data)
    const fs::path imputed = dir / "imputed.csv";
    expect(run(bin + " impute --input " + masked.string() + " --method hinge-left --output " +
               imputed.string()) == 0,
           "impute hinge-left exits 0");
    {
        const std::string text = slurp(imputed);
        expect(text.find(",,") == std::string::npos, "imputed csv has no missing cells");
        expect(text.rfind("s0,monthly", 0) == 0, "imputed csv keeps id and period");
    }

    // impute with a simulated gap on complete data + metrics in the log
    expect(run(bin + " impute --input " + input.string() + " --method linear --gap-size 5 --output " +
               (dir / "lin.csv").string()) == 0,
           "impute linear with simulated gap exits 0");

    // bench csv + json + plot data
    const fs::path report = dir / "report.csv";
    const fs::path plot = dir / "plot.csv";
    expect(run(bin + " bench --input " + input.string() +
               " --gap-sizes 5 --methods mean,locf,linear --min-length 70 --output " +
               report.string() + " --emit-plot-data " + plot.string()) == 0,
           "bench exits 0");
    {
        const std::string text = slurp(report);
        expect(text.rfind("series_id,method,side,gap_size", 0) == 0, "report header present");
        expect(text.find("# aggregates") != std::string::npos, "aggregates section present");
        expect(text.find("# selection_bounds") != std::string::npos, "selection section present");
        expect(slurp(plot).rfind("method,side,gap_size,series_id,smape", 0) == 0,
               "plot data header present");
    }
    const fs::path jreport = dir / "report.json";
    expect(run(bin + " bench --input " + input.string() +
               " --gap-sizes 5 --methods mean,locf --format json --output " + jreport.string()) == 0,
           "bench json exits 0");
    expect(slurp(jreport).find("\"rows\"") != std::string::npos, "json report has rows");

    // exit codes: 1 for configuration errors, 2 for data errors
    expect(run(bin + " bench --input " + input.string() + " --gap-sizes 0 --output " +
               (dir / "x.csv").string()) == 1,
           "invalid gap size exits 1");
    expect(run(bin + " impute --input " + input.string() + " --method nosuch 2>/dev/null") == 1,
           "unknown method exits 1");
    expect(run(bin + " impute --input " + (dir / "missing.csv").string() +
               " --method mean --gap-size 3 2>/dev/null") == 2,
           "missing input exits 2");
    {
        std::ofstream os(dir / "bad.csv");
        os << "s,monthly,1,abc,3\n";
    }
    expect(run(bin + " impute --input " + (dir / "bad.csv").string() +
               " --method mean --gap-size 1 2>/dev/null") == 2,
           "malformed number exits 2");

    // impute rejects non-contiguous gaps
    {
        std::ofstream os(dir / "split.csv");
        os << "s,monthly,1,,3,,5,6,7,8,9,10\n";
    }
    expect(run(bin + " impute --input " + (dir / "split.csv").string() +
               " --method mean 2>/dev/null") == 2,
           "non-contiguous gap exits 2");

    if (failures == 0) {
        std::cout << "cli smoke: all checks passed\n";
        fs::remove_all(dir);
        return 0;
    }
    std::cout << "cli smoke: " << failures << " checks failed (artifacts in " << dir << ")\n";
    return 1;
}
