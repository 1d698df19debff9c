#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gapfill/codec.hpp"
#include "gapfill/error.hpp"
#include "gapfill/image.hpp"

namespace gapfill {

struct InpaintConfig {
    enum class Search { exhaustive };
    enum class DistancePlane { decoded_scalar, raw_rgb };

    int patch_size = 9;
    Search search = Search::exhaustive;
    DistancePlane distance_plane = DistancePlane::decoded_scalar;
    double alpha = 1.0;
    double data_term_floor = 0.001;
    std::string debug_dump_dir{}; // when set, every fill step dumps image+mask there

    void validate() const {
        if (patch_size < 3 || patch_size % 2 == 0)
            throw ConfigError("patch size must be an odd integer >= 3");
        if (alpha <= 0.0) throw ConfigError("alpha must be positive");
    }
};

struct FillState {
    ImageGrid image;
    std::vector<char> known;       // row-major, nonzero = known pixel
    std::vector<double> confidence; // 1 for originally known pixels, 0 for unknown

    bool is_known(std::size_t x, std::size_t y) const { return known[y * image.width + x] != 0; }
};

inline FillState make_fill_state(const ImageGrid& image, const MaskGrid& mask) {
    if (image.width != mask.width || image.height != mask.height)
        throw ConfigError("image and mask dimensions differ");
    FillState st;
    st.image = image;
    st.known.resize(image.width * image.height);
    st.confidence.resize(image.width * image.height);
    for (std::size_t i = 0; i < st.known.size(); ++i) {
        const bool k = mask.unknown[i] == 0;
        st.known[i] = k ? 1 : 0;
        st.confidence[i] = k ? 1.0 : 0.0;
    }
    return st;
}

namespace detail {

class InpaintEngine {
public:
    InpaintEngine(FillState& state, const InpaintConfig& cfg)
        : st_(state), cfg_(cfg),
          w_(state.image.width), h_(state.image.height),
          half_(static_cast<std::size_t>(cfg.patch_size / 2)) {
        cfg_.validate();
        if (static_cast<std::size_t>(cfg_.patch_size) > std::min(w_, h_))
            throw ConfigError("patch size exceeds image dimensions");
        scalar_.resize(w_ * h_);
        for (std::size_t i = 0; i < scalar_.size(); ++i)
            scalar_[i] = plane_value(st_.image.pixels[i]);
        unknown_ = 0;
        for (char k : st_.known) unknown_ += (k == 0);
        rebuild_known_integral();
    }

    std::size_t unknown_count() const { return unknown_; }

    bool on_fill_front(std::size_t x, std::size_t y) const {
        if (st_.known[idx(x, y)]) return false;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
                const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
                if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w_) ||
                    ny >= static_cast<std::ptrdiff_t>(h_))
                    continue;
                if (st_.known[idx(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny))]) return true;
            }
        return false;
    }

    /// Mean confidence of the cropped patch around (x,y), normalized by its in-bounds area.
    double confidence_term(std::size_t x, std::size_t y) const {
        double sum = 0.0;
        std::size_t area = 0;
        for_patch(x, y, [&](std::size_t px, std::size_t py) {
            ++area;
            if (st_.known[idx(px, py)]) sum += st_.confidence[idx(px, py)];
        });
        return sum / static_cast<double>(area);
    }

    /// |isophote . front normal| / alpha, floored. The isophote is taken from the
    /// strongest gradient over the known pixels of the patch.
    double data_term(std::size_t x, std::size_t y) const {
        double gx = 0.0, gy = 0.0, best_mag = -1.0;
        for_patch(x, y, [&](std::size_t px, std::size_t py) {
            if (!st_.known[idx(px, py)]) return;
            const auto [qx, qy] = known_gradient(px, py);
            const double mag = qx * qx + qy * qy;
            if (mag > best_mag) {
                best_mag = mag;
                gx = qx;
                gy = qy;
            }
        });
        const auto [nx, ny] = front_normal(x, y);
        const double iso = std::abs(-gy * nx + gx * ny);
        return std::max(iso / cfg_.alpha, cfg_.data_term_floor);
    }

    double priority(std::size_t x, std::size_t y) const {
        return confidence_term(x, y) * data_term(x, y);
    }

    /// Exhaustive SSD scan over fully-inside, fully-known source patches; falls back to
    /// >=50%-known patches with a known center. Row-major ties keep the first minimum.
    std::pair<std::size_t, std::size_t> best_source_center(std::size_t tx, std::size_t ty) const {
        struct Offset { int dx, dy; double value; const Rgb* px; };
        std::vector<Offset> known_offsets;
        const int ps = cfg_.patch_size;
        for (int dy = -ps / 2; dy <= ps / 2; ++dy)
            for (int dx = -ps / 2; dx <= ps / 2; ++dx) {
                const auto px = static_cast<std::ptrdiff_t>(tx) + dx;
                const auto py = static_cast<std::ptrdiff_t>(ty) + dy;
                if (px < 0 || py < 0 || px >= static_cast<std::ptrdiff_t>(w_) ||
                    py >= static_cast<std::ptrdiff_t>(h_))
                    continue;
                const auto ux = static_cast<std::size_t>(px);
                const auto uy = static_cast<std::size_t>(py);
                if (st_.known[idx(ux, uy)])
                    known_offsets.push_back({dx, dy, scalar_[idx(ux, uy)], &st_.image.pixels[idx(ux, uy)]});
            }

        const std::size_t area = static_cast<std::size_t>(ps) * static_cast<std::size_t>(ps);
        double best = std::numeric_limits<double>::infinity();
        std::size_t bx = 0, by = 0;
        bool found = false;

        for (std::size_t sy = half_; sy + half_ < h_; ++sy) {
            for (std::size_t sx = half_; sx + half_ < w_; ++sx) {
                if (patch_known_count(sx, sy) != area) continue;
                double ssd = 0.0;
                for (const auto& o : known_offsets) {
                    const std::size_t qx = sx + static_cast<std::size_t>(o.dx);
                    const std::size_t qy = sy + static_cast<std::size_t>(o.dy);
                    ssd += pixel_distance2(o, qx, qy);
                    if (ssd >= best) break;
                }
                if (ssd < best) {
                    best = ssd;
                    bx = sx;
                    by = sy;
                    found = true;
                }
            }
        }
        if (found) return {bx, by};

        // fallback: partially known sources, compared over the overlap
        for (std::size_t sy = half_; sy + half_ < h_; ++sy) {
            for (std::size_t sx = half_; sx + half_ < w_; ++sx) {
                if (!st_.known[idx(sx, sy)]) continue;
                if (2 * patch_known_count(sx, sy) < area) continue;
                double ssd = 0.0;
                std::size_t n = 0;
                for (const auto& o : known_offsets) {
                    const std::size_t qx = sx + static_cast<std::size_t>(o.dx);
                    const std::size_t qy = sy + static_cast<std::size_t>(o.dy);
                    if (!st_.known[idx(qx, qy)]) continue;
                    ssd += pixel_distance2(o, qx, qy);
                    ++n;
                }
                const double mean = n == 0 ? 0.0 : ssd / static_cast<double>(n);
                if (mean < best) {
                    best = mean;
                    bx = sx;
                    by = sy;
                    found = true;
                }
            }
        }
        if (!found) throw DataError("inpainting found no usable source patch");
        return {bx, by};
    }

    /// One fill step: pick the highest-priority front pixel and copy its best patch in.
    /// Returns the number of pixels filled.
    std::size_t step() {
        double best_priority = -1.0;
        std::size_t px = 0, py = 0;
        double c_term = 0.0;
        for (std::size_t y = 0; y < h_; ++y) {
            for (std::size_t x = 0; x < w_; ++x) {
                if (!on_fill_front(x, y)) continue;
                const double c = confidence_term(x, y);
                const double p = c * data_term(x, y);
                if (p > best_priority) {
                    best_priority = p;
                    px = x;
                    py = y;
                    c_term = c;
                }
            }
        }
        if (best_priority < 0.0) throw PipelineError("fill front is empty with unknown pixels remaining");

        const auto [sx, sy] = best_source_center(px, py);
        const bool source_full = patch_known_count(sx, sy) ==
                                 static_cast<std::size_t>(cfg_.patch_size) * static_cast<std::size_t>(cfg_.patch_size);

        struct Fill { std::size_t x, y; Rgb value; };
        std::vector<Fill> fills;
        const int ps = cfg_.patch_size;
        for (int dy = -ps / 2; dy <= ps / 2; ++dy)
            for (int dx = -ps / 2; dx <= ps / 2; ++dx) {
                const auto ux = static_cast<std::ptrdiff_t>(px) + dx;
                const auto uy = static_cast<std::ptrdiff_t>(py) + dy;
                if (ux < 0 || uy < 0 || ux >= static_cast<std::ptrdiff_t>(w_) ||
                    uy >= static_cast<std::ptrdiff_t>(h_))
                    continue;
                const auto tx2 = static_cast<std::size_t>(ux);
                const auto ty2 = static_cast<std::size_t>(uy);
                if (st_.known[idx(tx2, ty2)]) continue;
                const std::size_t qx = sx + static_cast<std::size_t>(dx);
                const std::size_t qy = sy + static_cast<std::size_t>(dy);
                if (!source_full && !st_.known[idx(qx, qy)]) continue;
                fills.push_back({tx2, ty2, st_.image.pixels[idx(qx, qy)]});
            }

        for (const auto& f : fills) {
            const std::size_t i = idx(f.x, f.y);
            st_.image.pixels[i] = f.value;
            scalar_[i] = plane_value(f.value);
            st_.known[i] = 1;
            st_.confidence[i] = c_term;
        }
        unknown_ -= fills.size();
        rebuild_known_integral();
        return fills.size();
    }

    void run() {
        std::size_t steps = 0;
        const std::size_t max_steps = unknown_;
        while (unknown_ > 0) {
            if (steps >= max_steps) throw PipelineError("inpainting failed to make progress");
            const std::size_t filled = step();
            ++steps;
            if (filled == 0) throw PipelineError("inpainting fill step filled no pixels");
            dump_debug(steps);
        }
    }

private:
    std::size_t idx(std::size_t x, std::size_t y) const { return y * w_ + x; }

    double plane_value(const Rgb& px) const {
        if (cfg_.distance_plane == InpaintConfig::DistancePlane::decoded_scalar) return decode_rgb(px);
        return (static_cast<double>(px.r) + px.g + px.b) / (3.0 * 255.0);
    }

    struct OffsetRef { int dx, dy; double value; const Rgb* px; };

    double pixel_distance2(const auto& target_offset, std::size_t qx, std::size_t qy) const {
        if (cfg_.distance_plane == InpaintConfig::DistancePlane::decoded_scalar) {
            const double d = scalar_[idx(qx, qy)] - target_offset.value;
            return d * d;
        }
        const Rgb& a = st_.image.pixels[idx(qx, qy)];
        const Rgb& b = *target_offset.px;
        const double dr = static_cast<double>(a.r) - b.r;
        const double dg = static_cast<double>(a.g) - b.g;
        const double db = static_cast<double>(a.b) - b.b;
        return dr * dr + dg * dg + db * db;
    }

    template <typename F>
    void for_patch(std::size_t x, std::size_t y, F&& f) const {
        const int ps = cfg_.patch_size;
        for (int dy = -ps / 2; dy <= ps / 2; ++dy)
            for (int dx = -ps / 2; dx <= ps / 2; ++dx) {
                const auto px = static_cast<std::ptrdiff_t>(x) + dx;
                const auto py = static_cast<std::ptrdiff_t>(y) + dy;
                if (px < 0 || py < 0 || px >= static_cast<std::ptrdiff_t>(w_) ||
                    py >= static_cast<std::ptrdiff_t>(h_))
                    continue;
                f(static_cast<std::size_t>(px), static_cast<std::size_t>(py));
            }
    }

    /// Central/one-sided difference at a known pixel, using known neighbors only.
    std::pair<double, double> known_gradient(std::size_t x, std::size_t y) const {
        auto at = [&](std::ptrdiff_t px, std::ptrdiff_t py) -> const double* {
            if (px < 0 || py < 0 || px >= static_cast<std::ptrdiff_t>(w_) ||
                py >= static_cast<std::ptrdiff_t>(h_))
                return nullptr;
            const std::size_t i = idx(static_cast<std::size_t>(px), static_cast<std::size_t>(py));
            return st_.known[i] ? &scalar_[i] : nullptr;
        };
        const auto ix = static_cast<std::ptrdiff_t>(x);
        const auto iy = static_cast<std::ptrdiff_t>(y);
        const double center = scalar_[idx(x, y)];

        double gx = 0.0;
        if (const double* l = at(ix - 1, iy); l) {
            if (const double* r = at(ix + 1, iy); r) gx = (*r - *l) / 2.0;
            else gx = center - *l;
        } else if (const double* r = at(ix + 1, iy); r) {
            gx = *r - center;
        }

        double gy = 0.0;
        if (const double* u = at(ix, iy - 1); u) {
            if (const double* d = at(ix, iy + 1); d) gy = (*d - *u) / 2.0;
            else gy = center - *u;
        } else if (const double* d = at(ix, iy + 1); d) {
            gy = *d - center;
        }
        return {gx, gy};
    }

    /// Unit normal of the fill front from a 3x3 Sobel on the known indicator.
    std::pair<double, double> front_normal(std::size_t x, std::size_t y) const {
        static constexpr int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
        static constexpr int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
        double nx = 0.0, ny = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const auto px = static_cast<std::ptrdiff_t>(x) + dx;
                const auto py = static_cast<std::ptrdiff_t>(y) + dy;
                double k = 0.0;
                if (px >= 0 && py >= 0 && px < static_cast<std::ptrdiff_t>(w_) &&
                    py < static_cast<std::ptrdiff_t>(h_))
                    k = st_.known[idx(static_cast<std::size_t>(px), static_cast<std::size_t>(py))] ? 1.0 : 0.0;
                nx += kx[dy + 1][dx + 1] * k;
                ny += ky[dy + 1][dx + 1] * k;
            }
        const double mag = std::sqrt(nx * nx + ny * ny);
        if (mag == 0.0) return {0.0, 0.0};
        return {nx / mag, ny / mag};
    }

    std::size_t patch_known_count(std::size_t cx, std::size_t cy) const {
        const std::size_t x0 = cx - half_, y0 = cy - half_;
        const std::size_t x1 = cx + half_ + 1, y1 = cy + half_ + 1;
        return integral_[y1 * (w_ + 1) + x1] - integral_[y0 * (w_ + 1) + x1] -
               integral_[y1 * (w_ + 1) + x0] + integral_[y0 * (w_ + 1) + x0];
    }

    void rebuild_known_integral() {
        integral_.assign((w_ + 1) * (h_ + 1), 0);
        for (std::size_t y = 0; y < h_; ++y) {
            std::uint32_t row = 0;
            for (std::size_t x = 0; x < w_; ++x) {
                row += st_.known[idx(x, y)] ? 1u : 0u;
                integral_[(y + 1) * (w_ + 1) + (x + 1)] = integral_[y * (w_ + 1) + (x + 1)] + row;
            }
        }
    }

    void dump_debug(std::size_t step_no) const {
        if (cfg_.debug_dump_dir.empty()) return;
        namespace fs = std::filesystem;
        fs::create_directories(cfg_.debug_dump_dir);
        char name[32];
        std::snprintf(name, sizeof name, "fill_%04zu", step_no);
        std::ofstream img(fs::path(cfg_.debug_dump_dir) / (std::string(name) + ".ppm"), std::ios::binary);
        write_ppm(img, st_.image);
        MaskGrid mask;
        mask.width = w_;
        mask.height = h_;
        mask.unknown.resize(w_ * h_);
        for (std::size_t i = 0; i < mask.unknown.size(); ++i) mask.unknown[i] = st_.known[i] ? 0 : 1;
        std::ofstream m(fs::path(cfg_.debug_dump_dir) / (std::string(name) + ".mask"));
        write_mask_text(m, mask);
    }

    FillState& st_;
    InpaintConfig cfg_;
    std::size_t w_, h_, half_;
    std::vector<double> scalar_;
    std::vector<std::uint32_t> integral_;
    std::size_t unknown_ = 0;
};

} // namespace detail

/// Priority C(p)*D(p) of a fill-front pixel.
inline double compute_priority(const FillState& state, std::size_t x, std::size_t y,
                               const InpaintConfig& cfg = {}) {
    FillState copy = state;
    detail::InpaintEngine engine(copy, cfg);
    if (!engine.on_fill_front(x, y))
        throw std::invalid_argument("pixel is not on the fill front");
    return engine.priority(x, y);
}

/// Top-left corner of the best SSD source patch for the patch centered at (x, y).
inline std::pair<std::size_t, std::size_t> find_best_source(const FillState& state, std::size_t x,
                                                            std::size_t y,
                                                            const InpaintConfig& cfg = {}) {
    FillState copy = state;
    detail::InpaintEngine engine(copy, cfg);
    const auto [cx, cy] = engine.best_source_center(x, y);
    const auto half = static_cast<std::size_t>(cfg.patch_size / 2);
    return {cx - half, cy - half};
}

/// Fills every masked pixel; known pixels are preserved bit-exactly.
inline ImageGrid inpaint(const ImageGrid& image, const MaskGrid& mask, const InpaintConfig& cfg = {}) {
    cfg.validate();
    if (image.width != mask.width || image.height != mask.height)
        throw ConfigError("image and mask dimensions differ");
    if (static_cast<std::size_t>(cfg.patch_size) > std::min(image.width, image.height))
        throw ConfigError("patch size exceeds image dimensions");

    const std::size_t unknown = mask.unknown_count();
    if (unknown == 0) return image;
    if (unknown == image.width * image.height)
        throw DataError("cannot inpaint a fully masked image");

    FillState st = make_fill_state(image, mask);
    detail::InpaintEngine engine(st, cfg);
    engine.run();
    return std::move(st.image);
}

} // namespace gapfill
