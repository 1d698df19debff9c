#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gapfill/error.hpp"
#include "gapfill/image.hpp"
#include "gapfill/inpaint.hpp"
#include "gapfill/log.hpp"
#include "gapfill/series.hpp"

namespace gapfill {

enum class HingeSide { left, right };

inline const char* to_string(HingeSide side) { return side == HingeSide::left ? "left" : "right"; }

/// The hinge is the known point adjacent to the gap: p-1 on the left, p+T on the right.
inline std::size_t hinge_index_for(const GapSpec& gap, HingeSide side) {
    return side == HingeSide::left ? gap.start - 1 : gap.start + gap.size;
}

struct PipelineConfig {
    std::size_t rows = kDefaultRows;  // image height cap, clamped to the series length
    InpaintConfig inpaint{};
    FillHint fill_hint = FillHint::nearest;
};

struct HingePrep {
    TimeSeries series; // gap and hinge both absent
    GapSpec gap;
    double stored = 0.0;
    std::size_t hinge_index = 0;
};

/// Stores the hinge value and drops it from the series, widening the masked
/// region to gap + hinge.
inline HingePrep prepare_hinge(const MaskedSeries& masked, HingeSide side) {
    const std::size_t h = hinge_index_for(masked.gap, side);
    if (h >= masked.base.length() || !masked.base.values[h])
        throw std::invalid_argument("hinge position is absent from the input series");

    HingePrep prep;
    prep.series = masked.base;
    prep.gap = masked.gap;
    prep.stored = *masked.base.values[h];
    prep.hinge_index = h;
    prep.series.values[h].reset();
    return prep;
}

struct Selection {
    int family_k = 0;
    std::size_t row = 0;
    double hinge_error = 0.0;
    std::vector<double> gap_estimates; // scaled space
};

/// Global argmin of |hinge estimate - stored hinge| across all families and rows.
/// Ties break toward the lower family index, then the lower row.
inline Selection select_best(const std::vector<CandidateMatrix>& candidate_sets,
                             double stored_hinge_scaled) {
    Selection best;
    double best_err = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const auto& set : candidate_sets) {
        for (const auto& cand : set.candidates) {
            const double err = std::abs(cand.hinge_estimate - stored_hinge_scaled);
            if (err < best_err) {
                best_err = err;
                best = Selection{set.family_k, cand.row, err, cand.gap_estimates};
                found = true;
            }
        }
    }
    if (!found) throw DataError("hinge selection got no candidates");
    return best;
}

struct ImputationResult {
    TimeSeries imputed_series;
    Selection chosen;
    ScaleParams scale;
    std::vector<CandidateMatrix> per_family_candidates;
};

/// Full pipeline: drop hinge, rescale, embed into six images, inpaint, read the
/// candidate matrices back, pick by hinge error, substitute and unscale the gap.
/// The hinge position is restored from storage, never from its estimate.
inline ImputationResult hinge_fm2i(const MaskedSeries& masked, HingeSide side,
                                   const PipelineConfig& cfg = {}) {
    masked.gap.validate(masked.base.length());
    const HingePrep prep = prepare_hinge(masked, side);
    const ScaledSeries scaled = minmax_scale(prep.series);
    const double stored_scaled = scale_value(prep.stored, scaled.params);

    const std::size_t L = prep.series.length();
    const std::size_t rows = std::min(cfg.rows < 2 ? kDefaultRows : cfg.rows, L);

    InpaintConfig icfg = cfg.inpaint;
    const std::size_t max_patch = std::min(L, rows);
    if (static_cast<std::size_t>(icfg.patch_size) > max_patch) {
        auto clamped = static_cast<int>(max_patch);
        if (clamped % 2 == 0) --clamped;
        icfg.patch_size = std::max(clamped, 3);
        log::debug("series '%s': patch size clamped to %d for a %zux%zu image",
                   masked.base.id.c_str(), icfg.patch_size, L, rows);
    }

    ImputationResult result;
    result.scale = scaled.params;
    for (int k = 1; k <= kFamilyCount; ++k) {
        const TransformFamily family{k, rows};
        try {
            const MaskedGrid grid = build_matrix(scaled.series, family);
            EncodedImage encoded = grid_to_image(grid, cfg.fill_hint);
            InpaintConfig fam_cfg = icfg;
            if (!icfg.debug_dump_dir.empty())
                fam_cfg.debug_dump_dir = icfg.debug_dump_dir + "/family" + std::to_string(k);
            const ImageGrid inpainted = inpaint(encoded.image, encoded.mask, fam_cfg);
            result.per_family_candidates.push_back(
                extract_candidates(inpainted, family, prep.gap, prep.hinge_index));
        } catch (const std::exception& e) {
            log::warn("series '%s': transform family %d failed (%s), skipping",
                      masked.base.id.c_str(), k, e.what());
        }
    }
    if (result.per_family_candidates.empty())
        throw PipelineError("every transform family failed to inpaint series '" + masked.base.id + "'");

    result.chosen = select_best(result.per_family_candidates, stored_scaled);

    result.imputed_series = masked.base;
    result.imputed_series.values[prep.hinge_index] = prep.stored;
    for (std::size_t m = 0; m < prep.gap.size; ++m)
        result.imputed_series.values[prep.gap.start + m] =
            minmax_unscale_value(result.chosen.gap_estimates[m], scaled.params);
    return result;
}

} // namespace gapfill
