#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gapfill/codec.hpp"
#include "gapfill/error.hpp"
#include "gapfill/series.hpp"

namespace gapfill {

/// One of the six 2D embeddings of a series: row i of family k is the series
/// rotated left by i*k positions, so cell (i,j) holds x[(j + i*k) mod L].
struct TransformFamily {
    int k = 1;
    std::size_t rows = 32;

    void validate() const {
        if (k < 1 || k > 6) throw ConfigError("transform family index must lie in 1..6");
        if (rows < 2) throw ConfigError("transform family needs at least two rows");
    }
};

inline constexpr int kFamilyCount = 6;
inline constexpr std::size_t kDefaultRows = 32;

inline std::size_t default_rows_for_length(std::size_t length) {
    return std::min<std::size_t>(kDefaultRows, length);
}

/// R x L grid of optional scalars; origin(i,j) maps each cell back to its time index.
struct MaskedGrid {
    TransformFamily family;
    std::size_t width = 0;  // L
    std::size_t height = 0; // R
    std::vector<std::optional<double>> cells; // row-major

    std::size_t origin(std::size_t i, std::size_t j) const {
        return (j + i * static_cast<std::size_t>(family.k)) % width;
    }

    /// Column of time index t within row i (inverse of origin, rows are rotations).
    std::size_t column_of(std::size_t i, std::size_t t) const {
        const std::size_t shift = (i * static_cast<std::size_t>(family.k)) % width;
        return (t + width - shift) % width;
    }

    const std::optional<double>& at(std::size_t i, std::size_t j) const { return cells[i * width + j]; }
    std::optional<double>& at(std::size_t i, std::size_t j) { return cells[i * width + j]; }
};

struct ImageGrid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgb> pixels; // row-major

    const Rgb& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    Rgb& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }

    friend bool operator==(const ImageGrid&, const ImageGrid&) = default;
};

struct MaskGrid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<char> unknown; // row-major, nonzero = unknown pixel

    bool at(std::size_t x, std::size_t y) const { return unknown[y * width + x] != 0; }
    void set(std::size_t x, std::size_t y, bool v) { unknown[y * width + x] = v ? 1 : 0; }

    std::size_t unknown_count() const {
        std::size_t n = 0;
        for (char c : unknown) n += (c != 0);
        return n;
    }
};

enum class FillHint { zero, nearest };

/// Per-row imputation candidate: T gap estimates plus the hinge estimate, all in [0,1].
struct Candidate {
    std::size_t row = 0;
    std::vector<double> gap_estimates;
    double hinge_estimate = 0.0;
};

struct CandidateMatrix {
    int family_k = 1;
    std::vector<Candidate> candidates;
};

inline MaskedGrid build_matrix(const TimeSeries& scaled, const TransformFamily& family) {
    family.validate();
    const std::size_t L = scaled.length();
    if (L < 2) throw DataError("matrix generation needs a series of length at least 2");

    MaskedGrid grid;
    grid.family = family;
    grid.width = L;
    grid.height = family.rows;
    grid.cells.resize(L * family.rows);
    for (std::size_t i = 0; i < grid.height; ++i)
        for (std::size_t j = 0; j < L; ++j)
            grid.cells[i * L + j] = scaled.values[grid.origin(i, j)];
    return grid;
}

struct EncodedImage {
    ImageGrid image;
    MaskGrid mask;
};

/// Encodes present cells; absent cells are marked unknown and given a cosmetic
/// placeholder pixel that the inpainter never reads.
inline EncodedImage grid_to_image(const MaskedGrid& grid, FillHint hint = FillHint::nearest) {
    EncodedImage out;
    out.image.width = grid.width;
    out.image.height = grid.height;
    out.image.pixels.resize(grid.width * grid.height);
    out.mask.width = grid.width;
    out.mask.height = grid.height;
    out.mask.unknown.assign(grid.width * grid.height, 0);

    for (std::size_t i = 0; i < grid.height; ++i) {
        for (std::size_t j = 0; j < grid.width; ++j) {
            const auto& cell = grid.at(i, j);
            if (cell) {
                out.image.at(j, i) = encode_value(*cell);
                continue;
            }
            out.mask.set(j, i, true);
            if (hint == FillHint::zero) {
                out.image.at(j, i) = Rgb{0, 0, 0};
            } else {
                // nearest present cell in the same row, ties toward the left
                double v = 0.0;
                bool found = false;
                for (std::size_t d = 1; d < grid.width && !found; ++d) {
                    if (j >= d && grid.at(i, j - d)) { v = *grid.at(i, j - d); found = true; }
                    else if (j + d < grid.width && grid.at(i, j + d)) { v = *grid.at(i, j + d); found = true; }
                }
                out.image.at(j, i) = found ? encode_value(v) : Rgb{0, 0, 0};
            }
        }
    }
    return out;
}

/// Reads one candidate sequence per row out of a fully inpainted image.
inline CandidateMatrix extract_candidates(const ImageGrid& inpainted, const TransformFamily& family,
                                          const GapSpec& gap, std::size_t hinge_index) {
    family.validate();
    const std::size_t L = inpainted.width;
    if (inpainted.height != family.rows)
        throw ConfigError("image height does not match the transform family");
    MaskedGrid geom;
    geom.family = family;
    geom.width = L;
    geom.height = family.rows;

    CandidateMatrix out;
    out.family_k = family.k;
    out.candidates.reserve(family.rows);
    for (std::size_t i = 0; i < family.rows; ++i) {
        Candidate c;
        c.row = i;
        c.gap_estimates.reserve(gap.size);
        for (std::size_t m = 0; m < gap.size; ++m)
            c.gap_estimates.push_back(decode_rgb(inpainted.at(geom.column_of(i, gap.start + m), i)));
        c.hinge_estimate = decode_rgb(inpainted.at(geom.column_of(i, hinge_index), i));
        out.candidates.push_back(std::move(c));
    }
    return out;
}

/// Binary PPM (P6) dump for visual inspection.
inline void write_ppm(std::ostream& os, const ImageGrid& image) {
    os << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    for (const Rgb& px : image.pixels) {
        os.put(static_cast<char>(px.r));
        os.put(static_cast<char>(px.g));
        os.put(static_cast<char>(px.b));
    }
}

/// Plain-text mask: one row per line, 0 = known, 1 = unknown.
inline void write_mask_text(std::ostream& os, const MaskGrid& mask) {
    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x)
            os.put(mask.at(x, y) ? '1' : '0');
        os.put('\n');
    }
}

} // namespace gapfill
