#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "../support/synthetic.hpp"
#include "gapfill/bench.hpp"
#include "gapfill/hinge.hpp"
#include "gapfill/metrics.hpp"

using namespace gapfill;

namespace {

MaskedSeries gapped(const std::vector<double>& vals, std::size_t p, std::size_t t) {
    return inject_gap(TimeSeries::from_dense("h", Period::other, vals), GapSpec{p, t});
}

CandidateMatrix one_family(int k, const std::vector<double>& hinge_estimates) {
    CandidateMatrix cm;
    cm.family_k = k;
    for (std::size_t i = 0; i < hinge_estimates.size(); ++i)
        cm.candidates.push_back(Candidate{i, {0.1, 0.2}, hinge_estimates[i]});
    return cm;
}

} // namespace

TEST_CASE("prepare_hinge drops and stores the adjacent point", "[hinge]") {
    TimeSeries ts;
    ts.id = "p";
    ts.values = {1.0, 2.0, std::nullopt, std::nullopt, 5.0, 6.0};
    MaskedSeries masked{ts, GapSpec{2, 2}, {}};

    const auto left = prepare_hinge(masked, HingeSide::left);
    CHECK(left.hinge_index == 1);
    CHECK(left.stored == 2.0);
    CHECK(left.series.values[1] == std::nullopt);
    CHECK(left.series.present_count() == 3);

    const auto right = prepare_hinge(masked, HingeSide::right);
    CHECK(right.hinge_index == 4);
    CHECK(right.stored == 5.0);
    CHECK(right.series.values[4] == std::nullopt);
}

TEST_CASE("prepare_hinge boundary case", "[hinge]") {
    TimeSeries ts;
    ts.id = "b";
    ts.values = {9.0, std::nullopt, 7.0};
    MaskedSeries masked{ts, GapSpec{1, 1}, {}};
    const auto left = prepare_hinge(masked, HingeSide::left);
    CHECK(left.hinge_index == 0);
    CHECK(left.stored == 9.0);
}

TEST_CASE("select_best picks the minimal hinge error", "[hinge]") {
    const auto sel = select_best({one_family(1, {1.0, 0.5, 0.9})}, 0.95);
    CHECK(sel.family_k == 1);
    CHECK(sel.row == 2); // |0.9-0.95| beats |1.0-0.95| in double arithmetic
    CHECK(sel.hinge_error == Catch::Approx(0.05).margin(1e-12));
}

TEST_CASE("select_best breaks exact ties toward the lower family then row", "[hinge]") {
    // both families have candidates at error exactly 0.25
    const auto sel = select_best({one_family(1, {0.25, 0.75}), one_family(2, {0.75, 0.25})}, 0.5);
    CHECK(sel.family_k == 1);
    CHECK(sel.row == 0);

    const auto rows = select_best({one_family(3, {0.75, 0.75, 0.75})}, 0.5);
    CHECK(rows.family_k == 3);
    CHECK(rows.row == 0);
}

TEST_CASE("select_best requires candidates", "[hinge]") {
    CHECK_THROWS_AS(select_best({}, 0.5), DataError);
    CandidateMatrix empty;
    empty.family_k = 1;
    CHECK_THROWS_AS(select_best({empty}, 0.5), DataError);
}

TEST_CASE("constant series imputes exactly", "[hinge][pipeline]") {
    const auto masked = gapped(std::vector<double>(70, 5.0), 32, 5);
    const auto result = hinge_fm2i(masked, HingeSide::left);
    REQUIRE(result.imputed_series.complete());
    for (const auto& v : result.imputed_series.values) REQUIRE(*v == 5.0);
}

TEST_CASE("gap-free imputation is rejected at GapSpec construction", "[hinge]") {
    const auto ts = TimeSeries::from_dense("z", Period::other, std::vector<double>(20, 1.0));
    CHECK_THROWS_AS(inject_gap(ts, GapSpec{5, 0}), ConfigError);
}

TEST_CASE("pipeline output touches only the gap and restores the hinge", "[hinge][pipeline]") {
    const auto series = testsupport::m3_like("pipe", {77, 90, Period::monthly, false});
    const auto masked = inject_gap(series, GapSpec{42, 6});

    for (HingeSide side : {HingeSide::left, HingeSide::right}) {
        const auto result = hinge_fm2i(masked, side);
        REQUIRE(result.imputed_series.complete());
        const std::size_t h = hinge_index_for(masked.gap, side);
        for (std::size_t i = 0; i < series.length(); ++i) {
            if (i >= 42 && i < 48) continue;
            REQUIRE(*result.imputed_series.values[i] == *series.values[i]);
        }
        REQUIRE(*result.imputed_series.values[h] == *series.values[h]);
        REQUIRE(result.per_family_candidates.size() == 6);
        for (const auto& fam : result.per_family_candidates)
            for (const auto& cand : fam.candidates) {
                REQUIRE(cand.gap_estimates.size() == 6);
                for (double v : cand.gap_estimates) {
                    REQUIRE(v >= 0.0);
                    REQUIRE(v <= 1.0);
                }
            }
    }
}

TEST_CASE("pipeline is deterministic end to end", "[hinge][pipeline]") {
    const auto series = testsupport::m3_like("det", {5, 84, Period::quarterly, false});
    const auto masked = inject_gap(series, GapSpec{40, 5});
    const auto a = hinge_fm2i(masked, HingeSide::left);
    const auto b = hinge_fm2i(masked, HingeSide::left);
    REQUIRE(a.chosen.family_k == b.chosen.family_k);
    REQUIRE(a.chosen.row == b.chosen.row);
    for (std::size_t i = 0; i < series.length(); ++i)
        REQUIRE(*a.imputed_series.values[i] == *b.imputed_series.values[i]);
}

TEST_CASE("chosen hinge error is the pool minimum and smape is bracketed", "[hinge][pipeline]") {
    const auto series = testsupport::m3_like("brk", {13, 96, Period::monthly, false});
    const auto masked = inject_gap(series, GapSpec{45, 8});
    const auto result = hinge_fm2i(masked, HingeSide::left);

    const double stored_scaled = scale_value(*series.values[44], result.scale);
    double min_err = std::numeric_limits<double>::infinity();
    for (const auto& fam : result.per_family_candidates)
        for (const auto& cand : fam.candidates)
            min_err = std::min(min_err, std::abs(cand.hinge_estimate - stored_scaled));
    REQUIRE(result.chosen.hinge_error == min_err);

    const auto bounds = selection_bounds(result.per_family_candidates, result.scale, masked.removed);
    std::vector<double> estimates(masked.gap.size);
    for (std::size_t m = 0; m < masked.gap.size; ++m)
        estimates[m] = *result.imputed_series.values[masked.gap.start + m];
    const double selected = smape(masked.removed, estimates);
    REQUIRE(selected >= bounds.best);
    REQUIRE(selected <= bounds.worst);
}

TEST_CASE("small series clamp rows and patch size instead of failing", "[hinge][pipeline]") {
    const auto masked = gapped({1, 2, 3, 4, 5, 6, 7, 8, 6, 4, 3, 2}, 5, 2);
    const auto result = hinge_fm2i(masked, HingeSide::right);
    REQUIRE(result.imputed_series.complete());
}
