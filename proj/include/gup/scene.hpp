#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gup/augment.hpp"
#include "gup/color.hpp"
#include "gup/error.hpp"
#include "gup/image.hpp"
#include "gup/rng.hpp"

namespace gup {

enum class SceneKind { edges, gradient_blobs, checker };

inline SceneKind scene_kind_from_string(const std::string& s) {
    if (s == "edges") return SceneKind::edges;
    if (s == "gradient_blobs") return SceneKind::gradient_blobs;
    if (s == "checker") return SceneKind::checker;
    fail(Errc::invalid_argument, "unknown scene kind '" + s + "'");
}

inline std::string to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::edges: return "edges";
        case SceneKind::gradient_blobs: return "gradient_blobs";
        case SceneKind::checker: return "checker";
    }
    fail(Errc::invalid_argument, "unknown scene kind");
}

namespace detail {

// Up to 16 piecewise-constant regions from 4 random half-plane splits.
inline RgbImage scene_edges(int size, Rng& rng) {
    struct Line { double px, py, nx, ny; };
    std::vector<Line> lines(4);
    for (Line& l : lines) {
        l.px = rng.uniform(0.2, 0.8) * size;
        l.py = rng.uniform(0.2, 0.8) * size;
        const double angle = rng.uniform(0.0, 3.14159265358979323846);
        l.nx = std::cos(angle);
        l.ny = std::sin(angle);
    }
    struct RegionColor { double r, g, b; bool set = false; };
    std::vector<RegionColor> palette(16);
    RgbImage img(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            unsigned id = 0;
            for (std::size_t k = 0; k < lines.size(); ++k) {
                const double s = (c + 0.5 - lines[k].px) * lines[k].nx +
                                 (r + 0.5 - lines[k].py) * lines[k].ny;
                if (s >= 0.0) id |= 1u << k;
            }
            RegionColor& col = palette[id];
            if (!col.set) {
                // region colors drawn lazily in raster order, so the palette
                // depends only on which regions are visible
                const Hsv hsv{rng.uniform(), rng.uniform(0.5, 1.0), rng.uniform(0.25, 1.0)};
                hsv_to_rgb(hsv, col.r, col.g, col.b);
                col.set = true;
            }
            double* px = img.pixel(r, c);
            px[0] = col.r;
            px[1] = col.g;
            px[2] = col.b;
        }
    }
    return img;
}

inline RgbImage scene_gradient_blobs(int size, Rng& rng) {
    struct Blob { double cr, cc, sigma, amp; };
    std::vector<Blob> blobs(4);
    for (Blob& b : blobs) {
        b.cr = rng.uniform(0.0, 1.0) * size;
        b.cc = rng.uniform(0.0, 1.0) * size;
        b.sigma = rng.uniform(0.125, 0.25) * size;
        b.amp = rng.uniform(0.5, 1.0);
    }
    const double hue0 = rng.uniform();
    std::vector<double> field(static_cast<std::size_t>(size) * size, 0.0);
    double peak = 0.0;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            double s = 0.0;
            for (const Blob& b : blobs) {
                const double dr = r + 0.5 - b.cr;
                const double dc = c + 0.5 - b.cc;
                s += b.amp * std::exp(-(dr * dr + dc * dc) / (2.0 * b.sigma * b.sigma));
            }
            field[static_cast<std::size_t>(r) * size + c] = s;
            peak = std::max(peak, s);
        }
    }
    RgbImage img(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double f = field[static_cast<std::size_t>(r) * size + c] / peak;
            const double hue = hue0 + 0.3 * f;
            Hsv hsv{hue - std::floor(hue), 0.8, 0.2 + 0.8 * f};
            double* px = img.pixel(r, c);
            hsv_to_rgb(hsv, px[0], px[1], px[2]);
        }
    }
    return img;
}

inline RgbImage scene_checker(int size, Rng& rng) {
    const int cell = std::max(4, size / rng.uniform_int(6, 10));
    const int off_r = rng.uniform_int(0, cell - 1);
    const int off_c = rng.uniform_int(0, cell - 1);
    Hsv a{rng.uniform(), rng.uniform(0.5, 1.0), rng.uniform(0.6, 1.0)};
    Hsv b{rng.uniform(), rng.uniform(0.5, 1.0), rng.uniform(0.1, 0.4)};
    RgbImage img(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const int pr = (r + off_r) / cell;
            const int pc = (c + off_c) / cell;
            const Hsv& hsv = ((pr + pc) % 2 == 0) ? a : b;
            double* px = img.pixel(r, c);
            hsv_to_rgb(hsv, px[0], px[1], px[2]);
        }
    }
    return img;
}

} // namespace detail

inline RgbImage make_scene_rgb(SceneKind kind, int size, std::uint64_t seed) {
    require(size >= 32, Errc::invalid_argument, "scene size must be at least 32");
    Rng rng(seed);
    switch (kind) {
        case SceneKind::edges: return detail::scene_edges(size, rng);
        case SceneKind::gradient_blobs: return detail::scene_gradient_blobs(size, rng);
        case SceneKind::checker: return detail::scene_checker(size, rng);
    }
    fail(Errc::invalid_argument, "unknown scene kind");
}

struct ScenePair {
    Image guide;
    Image truth;
};

// Guide and truth share geometry but not radiometry: both come from the
// same RGB scene through independent hue-to-gray mappings.
inline ScenePair make_synthetic_scene(SceneKind kind, int size, std::uint64_t seed) {
    Rng rng(seed);
    const RgbImage rgb = make_scene_rgb(kind, size, rng.next_u64());
    AugmentSpec spec;
    spec.seed = rng.next_u64();
    auto [guide, truth] = augment_cross_spectral(rgb, spec);
    return {std::move(guide), std::move(truth)};
}

} // namespace gup
