#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gup/error.hpp"
#include "gup/image.hpp"

namespace gup {

struct MetricReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

// Capped so identical images average cleanly in report tables.
inline constexpr double kPsnrCapDb = 99.0;

inline double psnr(const Image& a, const Image& b, double peak = 1.0) {
    require(a.height == b.height && a.width == b.width, Errc::dimension_mismatch,
            "psnr needs equal dimensions");
    require(peak > 0.0, Errc::invalid_argument, "peak must be positive");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        sq += d * d;
    }
    const double mse = sq / static_cast<double>(a.data.size());
    if (mse == 0.0) return kPsnrCapDb;
    return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
}

namespace detail {

inline constexpr int kSsimRadius = 5;  // 11x11 window

inline const std::vector<double>& ssim_window_1d() {
    static const std::vector<double> w = [] {
        std::vector<double> v(2 * kSsimRadius + 1);
        const double sigma = 1.5;
        double sum = 0.0;
        for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
            v[k + kSsimRadius] = std::exp(-(k * k) / (2.0 * sigma * sigma));
            sum += v[k + kSsimRadius];
        }
        for (double& x : v) x /= sum;
        return v;
    }();
    return w;
}

// Valid-region separable convolution with the normalized Gaussian window;
// output is (h-2R) x (w-2R).
inline Image ssim_filter(const Image& img) {
    const auto& w = ssim_window_1d();
    const int R = kSsimRadius;
    require(img.height >= 2 * R + 1 && img.width >= 2 * R + 1, Errc::invalid_argument,
            "image smaller than the ssim window");
    Image horiz(img.height, img.width - 2 * R);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < horiz.width; ++c) {
            double s = 0.0;
            for (int k = 0; k < 2 * R + 1; ++k) s += w[k] * img.at(r, c + k);
            horiz.at(r, c) = s;
        }
    }
    Image out(img.height - 2 * R, horiz.width);
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            double s = 0.0;
            for (int k = 0; k < 2 * R + 1; ++k) s += w[k] * horiz.at(r + k, c);
            out.at(r, c) = s;
        }
    }
    return out;
}

} // namespace detail

inline double ssim(const Image& a, const Image& b) {
    require(a.height == b.height && a.width == b.width, Errc::dimension_mismatch,
            "ssim needs equal dimensions");
    const double C1 = 0.01 * 0.01;  // (K1 * peak)^2, peak 1
    const double C2 = 0.03 * 0.03;

    Image aa(a.height, a.width), bb(a.height, a.width), ab(a.height, a.width);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        aa.data[i] = a.data[i] * a.data[i];
        bb.data[i] = b.data[i] * b.data[i];
        ab.data[i] = a.data[i] * b.data[i];
    }
    const Image mu_a = detail::ssim_filter(a);
    const Image mu_b = detail::ssim_filter(b);
    const Image m_aa = detail::ssim_filter(aa);
    const Image m_bb = detail::ssim_filter(bb);
    const Image m_ab = detail::ssim_filter(ab);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.data.size(); ++i) {
        const double ma = mu_a.data[i], mb = mu_b.data[i];
        const double va = m_aa.data[i] - ma * ma;
        const double vb = m_bb.data[i] - mb * mb;
        const double cov = m_ab.data[i] - ma * mb;
        total += ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) /
                 ((ma * ma + mb * mb + C1) * (va + vb + C2));
    }
    return total / static_cast<double>(mu_a.data.size());
}

} // namespace gup
