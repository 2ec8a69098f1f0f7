#pragma once

#include <cmath>
#include <vector>

#include "gup/error.hpp"
#include "gup/image.hpp"
#include "gup/sparse.hpp"

namespace gup {

// Grid geometry of one upsampling problem. Scale factors are rational and may
// be non-integer per axis.
struct ScalePair {
    int hi_height = 0;
    int hi_width = 0;
    int lo_height = 0;
    int lo_width = 0;

    ScalePair() = default;
    ScalePair(int hh, int hw, int lh, int lw)
        : hi_height(hh), hi_width(hw), lo_height(lh), lo_width(lw) {
        require(lh >= 1 && lw >= 1 && hh >= lh && hw >= lw, Errc::invalid_argument,
                "scale pair requires hi >= lo >= 1 per axis");
    }

    double sy() const { return static_cast<double>(hi_height) / lo_height; }
    double sx() const { return static_cast<double>(hi_width) / lo_width; }
    int hi_pixels() const { return hi_height * hi_width; }
    int lo_pixels() const { return lo_height * lo_width; }
};

enum class DownsampleNorm { averaging, raw };

namespace detail {

// Overlap of low pixel l's 1-D footprint [l*hi/lo, (l+1)*hi/lo) with high
// pixel h's unit interval [h, h+1). Footprint bounds are computed as exact
// integer products before the single division, so adjacent footprints tile
// the high-res axis without gaps.
struct AxisOverlap {
    int first;
    std::vector<double> weight;  // weight[k] for high pixel first+k
};

inline AxisOverlap axis_overlaps(int l, int hi, int lo) {
    const double lo_edge = static_cast<double>(l) * hi / lo;
    const double hi_edge = static_cast<double>(l + 1) * hi / lo;
    AxisOverlap out;
    out.first = static_cast<int>(std::floor(lo_edge));
    for (int h = out.first; h < hi && static_cast<double>(h) < hi_edge; ++h) {
        const double a = std::max(lo_edge, static_cast<double>(h));
        const double b = std::min(hi_edge, static_cast<double>(h) + 1.0);
        if (b > a) out.weight.push_back(b - a);
    }
    return out;
}

} // namespace detail

// Area-overlap downsampling operator: entry (l, h) is the geometric overlap
// between low pixel l's footprint and high pixel h's unit square. Averaging
// mode divides each row by the footprint area sy*sx so rows sum to 1.
inline SparseOperator build_downsample(const ScalePair& scale, DownsampleNorm norm) {
    require(scale.hi_pixels() > 0 && scale.lo_pixels() > 0, Errc::invalid_argument,
            "zero-sized grid");
    const double area = scale.sy() * scale.sx();

    std::vector<SparseOperator::Triplet> entries;
    entries.reserve(static_cast<std::size_t>(scale.lo_pixels()) *
                    static_cast<std::size_t>(std::ceil(scale.sy() + 1) * std::ceil(scale.sx() + 1)));
    for (int ly = 0; ly < scale.lo_height; ++ly) {
        const auto oy = detail::axis_overlaps(ly, scale.hi_height, scale.lo_height);
        for (int lx = 0; lx < scale.lo_width; ++lx) {
            const auto ox = detail::axis_overlaps(lx, scale.hi_width, scale.lo_width);
            const int l = ly * scale.lo_width + lx;
            for (std::size_t iy = 0; iy < oy.weight.size(); ++iy) {
                for (std::size_t ix = 0; ix < ox.weight.size(); ++ix) {
                    const int h = (oy.first + static_cast<int>(iy)) * scale.hi_width +
                                  (ox.first + static_cast<int>(ix));
                    double w = oy.weight[iy] * ox.weight[ix];
                    if (norm == DownsampleNorm::averaging) w /= area;
                    entries.push_back({l, h, w});
                }
            }
        }
    }
    return SparseOperator::from_triplets(scale.lo_pixels(), scale.hi_pixels(), std::move(entries));
}

namespace detail {

// Catmull-Rom cubic convolution kernel (a = -0.5).
inline double cubic_weight(double t) {
    t = std::fabs(t);
    if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

} // namespace detail

// Bicubic resampling with pixel-center alignment and edge clamping; output
// clamped to [0,1]. Separable: horizontal pass then vertical pass.
inline Image bicubic_upsample(const Image& img, int out_height, int out_width) {
    require(out_height > 0 && out_width > 0, Errc::invalid_argument, "zero output size");
    require(img.height > 0 && img.width > 0, Errc::invalid_argument, "empty input image");

    const double scale_y = static_cast<double>(img.height) / out_height;
    const double scale_x = static_cast<double>(img.width) / out_width;

    // horizontal
    Image mid(img.height, out_width);
    for (int c = 0; c < out_width; ++c) {
        const double src = (c + 0.5) * scale_x - 0.5;
        const int base = static_cast<int>(std::floor(src));
        double w[4];
        for (int k = 0; k < 4; ++k) w[k] = detail::cubic_weight(src - (base - 1 + k));
        for (int r = 0; r < img.height; ++r) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += w[k] * img.at(r, detail::clamp_index(base - 1 + k, img.width));
            mid.at(r, c) = acc;
        }
    }

    // vertical
    Image out(out_height, out_width);
    for (int r = 0; r < out_height; ++r) {
        const double src = (r + 0.5) * scale_y - 0.5;
        const int base = static_cast<int>(std::floor(src));
        double w[4];
        for (int k = 0; k < 4; ++k) w[k] = detail::cubic_weight(src - (base - 1 + k));
        for (int c = 0; c < out_width; ++c) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += w[k] * mid.at(detail::clamp_index(base - 1 + k, img.height), c);
            out.at(r, c) = acc < 0.0 ? 0.0 : (acc > 1.0 ? 1.0 : acc);
        }
    }
    return out;
}

} // namespace gup
