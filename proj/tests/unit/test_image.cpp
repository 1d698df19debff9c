#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "gapfill/image.hpp"
#include "gapfill/series.hpp"

using namespace gapfill;

namespace {
TimeSeries abcd() { return TimeSeries::from_dense("abcd", Period::other, {0.1, 0.2, 0.3, 0.4}); }
} // namespace

TEST_CASE("build_matrix rotates rows by the family shift", "[image]") {
    const auto grid1 = build_matrix(abcd(), TransformFamily{1, 2});
    // rows: [a b c d; b c d a]
    CHECK(*grid1.at(0, 0) == 0.1);
    CHECK(*grid1.at(0, 3) == 0.4);
    CHECK(*grid1.at(1, 0) == 0.2);
    CHECK(*grid1.at(1, 1) == 0.3);
    CHECK(*grid1.at(1, 2) == 0.4);
    CHECK(*grid1.at(1, 3) == 0.1);

    const auto grid2 = build_matrix(abcd(), TransformFamily{2, 2});
    // rows: [a b c d; c d a b]
    CHECK(*grid2.at(1, 0) == 0.3);
    CHECK(*grid2.at(1, 1) == 0.4);
    CHECK(*grid2.at(1, 2) == 0.1);
    CHECK(*grid2.at(1, 3) == 0.2);
}

TEST_CASE("build_matrix places absences by the origin rule", "[image]") {
    auto ts = abcd();
    ts.values[2].reset();
    const auto grid = build_matrix(ts, TransformFamily{1, 3});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const bool expect_absent = (i == 0 && j == 2) || (i == 1 && j == 1) || (i == 2 && j == 0);
            CHECK(grid.at(i, j).has_value() == !expect_absent);
        }
}

TEST_CASE("every time index appears exactly once per row", "[image][property]") {
    const auto ts = TimeSeries::from_dense("cover", Period::other,
                                           std::vector<double>(23, 0.5));
    for (int k = 1; k <= 6; ++k) {
        const auto grid = build_matrix(ts, TransformFamily{k, 7});
        for (std::size_t i = 0; i < grid.height; ++i) {
            std::vector<int> seen(grid.width, 0);
            for (std::size_t j = 0; j < grid.width; ++j) ++seen[grid.origin(i, j)];
            for (int c : seen) REQUIRE(c == 1);
            for (std::size_t t = 0; t < grid.width; ++t) REQUIRE(grid.origin(i, grid.column_of(i, t)) == t);
        }
    }
}

TEST_CASE("grid_to_image marks exactly the absent cells", "[image]") {
    auto ts = TimeSeries::from_dense("m", Period::other, std::vector<double>(9, 0.25));
    const auto full = grid_to_image(build_matrix(ts, TransformFamily{1, 3}));
    CHECK(full.mask.unknown_count() == 0);

    ts.values[4].reset();
    ts.values[5].reset();
    const auto masked = grid_to_image(build_matrix(ts, TransformFamily{1, 3}));
    CHECK(masked.mask.unknown_count() == 2 * 3);
}

TEST_CASE("grid_to_image encodes present values in place", "[image]") {
    auto ts = TimeSeries::from_dense("e", Period::other, {1.0, 0.0, 0.5});
    const auto enc = grid_to_image(build_matrix(ts, TransformFamily{1, 2}));
    CHECK(enc.image.at(0, 0) == Rgb{255, 255, 255});
    CHECK(enc.image.at(1, 0) == Rgb{0, 0, 0});
    CHECK(enc.image.at(0, 1) == Rgb{0, 0, 0}); // row 1 starts at index 1
}

TEST_CASE("placeholder pixels copy the nearest present neighbor", "[image]") {
    TimeSeries ts;
    ts.id = "ph";
    ts.values = {0.25, std::nullopt, std::nullopt, 1.0};
    const auto enc = grid_to_image(build_matrix(ts, TransformFamily{1, 2}), FillHint::nearest);
    CHECK(enc.image.at(1, 0) == encode_value(0.25));
    CHECK(enc.image.at(2, 0) == encode_value(1.0));
    const auto zero = grid_to_image(build_matrix(ts, TransformFamily{1, 2}), FillHint::zero);
    CHECK(zero.image.at(1, 0) == Rgb{0, 0, 0});
}

TEST_CASE("extract_candidates reproduces a gap-free series within quantization", "[image]") {
    std::vector<double> vals;
    for (int i = 0; i < 12; ++i) vals.push_back(static_cast<double>(i) / 11.0);
    const auto ts = TimeSeries::from_dense("id", Period::other, vals);
    const TransformFamily family{3, 3};
    const auto enc = grid_to_image(build_matrix(ts, family));
    const GapSpec gap{4, 3};
    const auto cands = extract_candidates(enc.image, family, gap, gap.start - 1);
    REQUIRE(cands.candidates.size() == 3);
    for (const auto& c : cands.candidates) {
        REQUIRE(c.gap_estimates.size() == gap.size);
        for (std::size_t m = 0; m < gap.size; ++m)
            CHECK(std::abs(c.gap_estimates[m] - vals[gap.start + m]) <= kQuantizationStep);
        CHECK(std::abs(c.hinge_estimate - vals[gap.start - 1]) <= kQuantizationStep);
        for (double v : c.gap_estimates) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("ppm and mask exports have the documented shape", "[image]") {
    auto ts = TimeSeries::from_dense("ppm", Period::other, {0.0, 1.0, 0.5});
    auto grid = build_matrix(ts, TransformFamily{1, 2});
    const auto enc = grid_to_image(grid);
    std::ostringstream img;
    write_ppm(img, enc.image);
    const std::string data = img.str();
    CHECK(data.rfind("P6\n3 2\n255\n", 0) == 0);
    CHECK(data.size() == std::string("P6\n3 2\n255\n").size() + 3 * 2 * 3);

    ts.values[1].reset();
    const auto enc2 = grid_to_image(build_matrix(ts, TransformFamily{1, 2}));
    std::ostringstream mask;
    write_mask_text(mask, enc2.mask);
    CHECK(mask.str() == "010\n100\n");
}
