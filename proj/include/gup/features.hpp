#pragma once

#include <string>
#include <vector>

#include "gup/error.hpp"
#include "gup/image.hpp"
#include "gup/image_io.hpp"

namespace gup {

// Per-pixel linear map: out[j] = sum_i in[i] * m[i*out_channels + j].
// Stands in for a learned feature extractor; starts as a (truncated)
// identity so an untrained transform reproduces the raw features.
struct LinearTransform {
    int in_channels = 0;
    int out_channels = 0;
    std::vector<double> m;  // row-major in_channels x out_channels

    LinearTransform() = default;
    LinearTransform(int in, int out)
        : in_channels(in), out_channels(out),
          m(static_cast<std::size_t>(in) * static_cast<std::size_t>(out), 0.0) {
        require(in >= 1 && out >= 1, Errc::invalid_argument, "transform dims must be positive");
        for (int i = 0; i < in && i < out; ++i)
            m[static_cast<std::size_t>(i) * out + i] = 1.0;
    }

    double& at(int i, int j) { return m[static_cast<std::size_t>(i) * out_channels + j]; }
    double at(int i, int j) const { return m[static_cast<std::size_t>(i) * out_channels + j]; }
};

enum class FeatureProvider { intensity, intensity_gradient, patch3, external };

// Provider selection plus the file path when features come from disk.
struct FeatureSpec {
    FeatureProvider provider = FeatureProvider::intensity_gradient;
    std::string external_path;
};

inline std::string provider_id(const FeatureSpec& spec) {
    switch (spec.provider) {
        case FeatureProvider::intensity: return "intensity";
        case FeatureProvider::intensity_gradient: return "intensity_gradient";
        case FeatureProvider::patch3: return "patch3";
        case FeatureProvider::external: return "external:" + spec.external_path;
    }
    fail(Errc::invalid_argument, "unknown feature provider");
}

inline FeatureSpec parse_provider(const std::string& id) {
    if (id == "intensity") return {FeatureProvider::intensity, {}};
    if (id == "intensity_gradient") return {FeatureProvider::intensity_gradient, {}};
    if (id == "patch3") return {FeatureProvider::patch3, {}};
    if (id.rfind("external:", 0) == 0)
        return {FeatureProvider::external, id.substr(9)};
    fail(Errc::invalid_argument, "unknown feature provider '" + id + "'");
}

inline int provider_channel_count(const FeatureSpec& spec) {
    switch (spec.provider) {
        case FeatureProvider::intensity: return 1;
        case FeatureProvider::intensity_gradient: return 3;
        case FeatureProvider::patch3: return 9;
        case FeatureProvider::external: return load_features(spec.external_path).channels;
    }
    fail(Errc::invalid_argument, "unknown feature provider");
}

// Raw features before any learnable transform.
inline FeatureMap provider_features(const Image& guide, const FeatureSpec& spec) {
    const int h = guide.height, w = guide.width;
    switch (spec.provider) {
        case FeatureProvider::intensity: {
            FeatureMap f(h, w, 1);
            f.data = guide.data;
            return f;
        }
        case FeatureProvider::intensity_gradient: {
            // value + central-difference dx, dy with edge replication
            FeatureMap f(h, w, 3);
            for (int r = 0; r < h; ++r) {
                for (int c = 0; c < w; ++c) {
                    double* p = f.pixel(r, c);
                    p[0] = guide.at(r, c);
                    p[1] = 0.5 * (guide.at(r, detail::clamp_index(c + 1, w)) -
                                  guide.at(r, detail::clamp_index(c - 1, w)));
                    p[2] = 0.5 * (guide.at(detail::clamp_index(r + 1, h), c) -
                                  guide.at(detail::clamp_index(r - 1, h), c));
                }
            }
            return f;
        }
        case FeatureProvider::patch3: {
            // 3x3 neighborhood, row-major over (dr, dc), edge replicated
            FeatureMap f(h, w, 9);
            for (int r = 0; r < h; ++r) {
                for (int c = 0; c < w; ++c) {
                    double* p = f.pixel(r, c);
                    int m = 0;
                    for (int dr = -1; dr <= 1; ++dr)
                        for (int dc = -1; dc <= 1; ++dc)
                            p[m++] = guide.at(detail::clamp_index(r + dr, h),
                                              detail::clamp_index(c + dc, w));
                }
            }
            return f;
        }
        case FeatureProvider::external: {
            FeatureMap f = load_features(spec.external_path);
            require(f.height == h && f.width == w, Errc::dimension_mismatch,
                    "external features do not match the guide grid");
            return f;
        }
    }
    fail(Errc::invalid_argument, "unknown feature provider");
}

inline FeatureMap apply_transform(const FeatureMap& raw, const LinearTransform& t) {
    require(t.in_channels == raw.channels, Errc::dimension_mismatch,
            "transform input dim does not match features");
    FeatureMap out(raw.height, raw.width, t.out_channels);
    for (std::size_t p = 0; p < raw.pixels(); ++p) {
        const double* in = raw.pixel(p);
        double* o = out.pixel(p);
        for (int j = 0; j < t.out_channels; ++j) {
            double s = 0.0;
            for (int i = 0; i < t.in_channels; ++i) s += in[i] * t.at(i, j);
            o[j] = s;
        }
    }
    return out;
}

// Adjoint of apply_transform with respect to the matrix entries:
// out = raw * M entrywise per pixel, so dM[i][j] = sum_p raw[p][i] * d_out[p][j].
// Returned row-major in the same layout as LinearTransform::m.
inline std::vector<double> vjp_transform(const FeatureMap& raw, const FeatureMap& d_out,
                                         const LinearTransform& t) {
    require(t.in_channels == raw.channels, Errc::dimension_mismatch,
            "transform input dim does not match features");
    require(d_out.height == raw.height && d_out.width == raw.width &&
                d_out.channels == t.out_channels,
            Errc::dimension_mismatch, "output gradient does not match the transformed map");
    std::vector<double> dm(t.m.size(), 0.0);
    for (std::size_t p = 0; p < raw.pixels(); ++p) {
        const double* in = raw.pixel(p);
        const double* go = d_out.pixel(p);
        for (int i = 0; i < t.in_channels; ++i)
            for (int j = 0; j < t.out_channels; ++j)
                dm[static_cast<std::size_t>(i) * t.out_channels + j] += in[i] * go[j];
    }
    return dm;
}

inline FeatureMap make_features(const Image& guide, const FeatureSpec& spec,
                                const LinearTransform* transform = nullptr) {
    FeatureMap raw = provider_features(guide, spec);
    if (transform == nullptr) return raw;
    return apply_transform(raw, *transform);
}

} // namespace gup
