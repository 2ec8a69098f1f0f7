#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gup/error.hpp"

namespace gup {

namespace detail {

// Replicating (clamp-to-edge) index for out-of-range neighbor access.
inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

} // namespace detail

// Row-major grayscale raster, nominal range [0,1]. Row 0 is the top row.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {
        require(h > 0 && w > 0, Errc::invalid_argument, "image dimensions must be positive");
    }

    std::size_t size() const { return data.size(); }
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
};

// Per-pixel feature vectors over a grid, channel-fastest in memory.
struct FeatureMap {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int h, int w, int f, double fill = 0.0)
        : height(h), width(w), channels(f),
          data(static_cast<std::size_t>(h) * w * f, fill) {
        require(h > 0 && w > 0 && f >= 1, Errc::invalid_argument,
                "feature map dimensions must be positive, channels >= 1");
    }

    std::size_t pixels() const { return static_cast<std::size_t>(height) * width; }
    double* pixel(int r, int c) {
        return data.data() + (static_cast<std::size_t>(r) * width + c) * channels;
    }
    const double* pixel(int r, int c) const {
        return data.data() + (static_cast<std::size_t>(r) * width + c) * channels;
    }
    const double* pixel(std::size_t flat) const { return data.data() + flat * channels; }
    double* pixel(std::size_t flat) { return data.data() + flat * channels; }
};

// Row-major (r, g, b) triples in [0,1].
struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    RgbImage() = default;
    RgbImage(int h, int w)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0.0) {
        require(h > 0 && w > 0, Errc::invalid_argument, "image dimensions must be positive");
    }

    double* pixel(int r, int c) {
        return data.data() + (static_cast<std::size_t>(r) * width + c) * 3;
    }
    const double* pixel(int r, int c) const {
        return data.data() + (static_cast<std::size_t>(r) * width + c) * 3;
    }
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace gup
