#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "gup/color.hpp"
#include "gup/error.hpp"
#include "gup/image.hpp"
#include "gup/rng.hpp"

namespace gup {

// Cross-spectral augmentation: random anchor hues get random gray values,
// independently per output channel; hues in between interpolate linearly
// around the hue circle. Guide and target share the anchors (and hence the
// geometry) but not the gray values.
struct AugmentSpec {
    int anchor_count = 6;
    std::uint64_t seed = 0;
};

namespace detail {

// Piecewise-linear interpolation on the hue circle; anchors sorted in [0,1).
struct HueMapping {
    std::vector<double> anchors;
    std::vector<double> grays;
    double mean_gray = 0.0;  // fallback for undefined hue (s == 0)

    double operator()(double hue) const {
        const std::size_t k = anchors.size();
        // locate the segment [anchors[i], anchors[i+1]) containing hue,
        // wrapping the last segment around to anchors[0] + 1
        const auto it = std::upper_bound(anchors.begin(), anchors.end(), hue);
        if (it == anchors.begin() || it == anchors.end()) {
            const double a = anchors[k - 1];
            const double b = anchors[0] + 1.0;
            const double h = hue < anchors[0] ? hue + 1.0 : hue;
            const double width = b - a;
            if (width <= 0.0) return grays[k - 1];
            const double t = (h - a) / width;
            return (1.0 - t) * grays[k - 1] + t * grays[0];
        }
        const std::size_t i = static_cast<std::size_t>(it - anchors.begin()) - 1;
        const double width = anchors[i + 1] - anchors[i];
        if (width <= 0.0) return grays[i];
        const double t = (hue - anchors[i]) / width;
        return (1.0 - t) * grays[i] + t * grays[i + 1];
    }
};

} // namespace detail

inline std::pair<Image, Image> augment_cross_spectral(const RgbImage& rgb,
                                                      const AugmentSpec& spec) {
    require(spec.anchor_count >= 2, Errc::invalid_argument, "need at least 2 anchors");
    require(rgb.height > 0 && rgb.width > 0, Errc::invalid_argument, "empty image");

    Rng rng(spec.seed);
    std::vector<double> anchors(static_cast<std::size_t>(spec.anchor_count));
    for (double& a : anchors) a = rng.uniform();
    std::sort(anchors.begin(), anchors.end());

    detail::HueMapping guide_map, target_map;
    guide_map.anchors = anchors;
    target_map.anchors = std::move(anchors);
    guide_map.grays.resize(static_cast<std::size_t>(spec.anchor_count));
    target_map.grays.resize(static_cast<std::size_t>(spec.anchor_count));
    for (double& g : guide_map.grays) g = rng.uniform();
    for (double& g : target_map.grays) g = rng.uniform();
    for (double g : guide_map.grays) guide_map.mean_gray += g;
    for (double g : target_map.grays) target_map.mean_gray += g;
    guide_map.mean_gray /= spec.anchor_count;
    target_map.mean_gray /= spec.anchor_count;

    Image guide(rgb.height, rgb.width);
    Image target(rgb.height, rgb.width);
    for (int r = 0; r < rgb.height; ++r) {
        for (int c = 0; c < rgb.width; ++c) {
            const double* px = rgb.pixel(r, c);
            const Hsv hsv = rgb_to_hsv(px[0], px[1], px[2]);
            // gray from the hue mapping, modulated by V so luminance
            // structure survives in both outputs
            if (hsv.s == 0.0) {
                guide.at(r, c) = guide_map.mean_gray * hsv.v;
                target.at(r, c) = target_map.mean_gray * hsv.v;
            } else {
                guide.at(r, c) = guide_map(hsv.h) * hsv.v;
                target.at(r, c) = target_map(hsv.h) * hsv.v;
            }
        }
    }
    return {std::move(guide), std::move(target)};
}

} // namespace gup
