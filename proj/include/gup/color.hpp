#pragma once

#include <algorithm>
#include <cmath>

namespace gup {

// h in [0,1) turns; s, v in [0,1]. Hue is reported as 0 when undefined
// (s == 0); callers that care must branch on s.
struct Hsv {
    double h;
    double s;
    double v;
};

inline Hsv rgb_to_hsv(double r, double g, double b) {
    const double maxc = std::max({r, g, b});
    const double minc = std::min({r, g, b});
    const double delta = maxc - minc;
    Hsv out{0.0, 0.0, maxc};
    if (maxc > 0.0) out.s = delta / maxc;
    if (delta > 0.0) {
        double h;
        if (maxc == r)
            h = (g - b) / delta;
        else if (maxc == g)
            h = (b - r) / delta + 2.0;
        else
            h = (r - g) / delta + 4.0;
        h /= 6.0;
        if (h < 0.0) h += 1.0;
        if (h >= 1.0) h -= 1.0;
        out.h = h;
    }
    return out;
}

inline void hsv_to_rgb(const Hsv& hsv, double& r, double& g, double& b) {
    if (hsv.s <= 0.0) {
        r = g = b = hsv.v;
        return;
    }
    const double h6 = hsv.h * 6.0;
    const int sector = static_cast<int>(h6) % 6;
    const double f = h6 - std::floor(h6);
    const double p = hsv.v * (1.0 - hsv.s);
    const double q = hsv.v * (1.0 - hsv.s * f);
    const double t = hsv.v * (1.0 - hsv.s * (1.0 - f));
    switch (sector) {
    case 0: r = hsv.v; g = t; b = p; break;
    case 1: r = q; g = hsv.v; b = p; break;
    case 2: r = p; g = hsv.v; b = t; break;
    case 3: r = p; g = q; b = hsv.v; break;
    case 4: r = t; g = p; b = hsv.v; break;
    default: r = hsv.v; g = p; b = q; break;
    }
}

} // namespace gup
