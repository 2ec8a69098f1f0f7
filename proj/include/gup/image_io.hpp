#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gup/error.hpp"
#include "gup/image.hpp"

namespace gup {

enum class SaveFormat { pgm16, pfm };

namespace detail {

// Netpbm-style token scan: skips whitespace and '#' comments.
inline std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (!std::isspace(ch)) {
            tok.push_back(static_cast<char>(ch));
            while ((ch = in.get()) != EOF && !std::isspace(ch)) tok.push_back(static_cast<char>(ch));
            break;
        }
    }
    return tok;
}

inline long parse_long(const std::string& tok, const char* what) {
    if (tok.empty()) fail(Errc::malformed_header, std::string("missing ") + what);
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        fail(Errc::malformed_header, std::string("bad ") + what + " '" + tok + "'");
    }
    if (pos != tok.size()) fail(Errc::malformed_header, std::string("bad ") + what + " '" + tok + "'");
    return v;
}

inline float read_f32_le(const unsigned char* p) {
    std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                      (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

inline void write_f32_le(unsigned char* p, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    p[0] = static_cast<unsigned char>(u & 0xff);
    p[1] = static_cast<unsigned char>((u >> 8) & 0xff);
    p[2] = static_cast<unsigned char>((u >> 16) & 0xff);
    p[3] = static_cast<unsigned char>((u >> 24) & 0xff);
}

} // namespace detail

inline Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_failure, "cannot open '" + path + "'");

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in) fail(Errc::malformed_header, "truncated magic in '" + path + "'");

    if (m0 == 'P' && (m1 == '2' || m1 == '5')) {
        const bool ascii = (m1 == '2');
        const long w = detail::parse_long(detail::next_token(in), "width");
        const long h = detail::parse_long(detail::next_token(in), "height");
        const long maxval = detail::parse_long(detail::next_token(in), "maxval");
        if (w <= 0 || h <= 0) fail(Errc::malformed_header, "non-positive dimensions");
        if (maxval <= 0 || maxval > 65535) fail(Errc::unsupported_format, "maxval out of range");

        Image img(static_cast<int>(h), static_cast<int>(w));
        const double scale = 1.0 / static_cast<double>(maxval);
        if (ascii) {
            for (double& px : img.data) {
                const long v = detail::parse_long(detail::next_token(in), "sample");
                if (v < 0 || v > maxval) fail(Errc::malformed_header, "sample out of range");
                px = static_cast<double>(v) * scale;
            }
        } else {
            // single whitespace byte separates maxval from the raster
            const int bytes_per = maxval > 255 ? 2 : 1;
            std::vector<unsigned char> raw(img.size() * bytes_per);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (static_cast<std::size_t>(in.gcount()) != raw.size())
                fail(Errc::io_failure, "truncated raster in '" + path + "'");
            for (std::size_t i = 0; i < img.size(); ++i) {
                long v = bytes_per == 2
                             ? (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1]  // big-endian per Netpbm
                             : raw[i];
                if (v > maxval) fail(Errc::malformed_header, "sample out of range");
                img.data[i] = static_cast<double>(v) * scale;
            }
        }
        return img;
    }

    if (m0 == 'P' && m1 == 'f') {
        const long w = detail::parse_long(detail::next_token(in), "width");
        const long h = detail::parse_long(detail::next_token(in), "height");
        const std::string scale_tok = detail::next_token(in);
        if (scale_tok.empty()) fail(Errc::malformed_header, "missing scale");
        double scale = 0.0;
        try {
            scale = std::stod(scale_tok);
        } catch (const std::exception&) {
            fail(Errc::malformed_header, "bad scale '" + scale_tok + "'");
        }
        if (w <= 0 || h <= 0) fail(Errc::malformed_header, "non-positive dimensions");
        if (scale == 0.0) fail(Errc::malformed_header, "zero scale");
        const bool little_endian = scale < 0.0;

        Image img(static_cast<int>(h), static_cast<int>(w));
        std::vector<unsigned char> raw(img.size() * 4);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            fail(Errc::io_failure, "truncated raster in '" + path + "'");

        // PFM raster is bottom-up; flip to top-down rows in memory.
        for (long r = 0; r < h; ++r) {
            const long src_row = h - 1 - r;
            for (long c = 0; c < w; ++c) {
                unsigned char b[4];
                const unsigned char* p = raw.data() + (src_row * w + c) * 4;
                if (little_endian) {
                    b[0] = p[0]; b[1] = p[1]; b[2] = p[2]; b[3] = p[3];
                } else {
                    b[0] = p[3]; b[1] = p[2]; b[2] = p[1]; b[3] = p[0];
                }
                const float f = detail::read_f32_le(b);
                if (!std::isfinite(f)) fail(Errc::non_finite, "non-finite sample in '" + path + "'");
                img.at(static_cast<int>(r), static_cast<int>(c)) = static_cast<double>(f);
            }
        }
        return img;
    }

    if (m0 == 'P' && m1 == 'F') fail(Errc::unsupported_format, "color PFM not supported");
    fail(Errc::unsupported_format, "unknown magic in '" + path + "'");
}

inline void save_image(const Image& img, const std::string& path, SaveFormat format) {
    require(img.height > 0 && img.width > 0 && img.size() == img.data.size(),
            Errc::invalid_argument, "invalid image");
    require(all_finite(img.data), Errc::non_finite, "non-finite pixels in '" + path + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_failure, "cannot open '" + path + "' for writing");

    if (format == SaveFormat::pgm16) {
        out << "P5\n" << img.width << " " << img.height << "\n65535\n";
        std::vector<unsigned char> raw(img.size() * 2);
        for (std::size_t i = 0; i < img.size(); ++i) {
            double v = img.data[i];
            v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
            const unsigned q = static_cast<unsigned>(std::floor(v * 65535.0 + 0.5));  // round half up
            raw[2 * i] = static_cast<unsigned char>((q >> 8) & 0xff);
            raw[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    } else {
        out << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
        std::vector<unsigned char> raw(img.size() * 4);
        for (int r = 0; r < img.height; ++r) {
            const int dst_row = img.height - 1 - r;  // bottom-up on disk
            for (int c = 0; c < img.width; ++c) {
                detail::write_f32_le(raw.data() + (static_cast<std::size_t>(dst_row) * img.width + c) * 4,
                                     static_cast<float>(img.at(r, c)));
            }
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    if (!out) fail(Errc::io_failure, "write failed for '" + path + "'");
}

// PPM (P3/P6), the RGB sibling of PGM. Augmentation input path.
inline RgbImage load_rgb(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_failure, "cannot open '" + path + "'");

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in) fail(Errc::malformed_header, "truncated magic in '" + path + "'");
    if (m0 != 'P' || (m1 != '3' && m1 != '6')) fail(Errc::unsupported_format, "not a PPM file");
    const bool ascii = (m1 == '3');

    const long w = detail::parse_long(detail::next_token(in), "width");
    const long h = detail::parse_long(detail::next_token(in), "height");
    const long maxval = detail::parse_long(detail::next_token(in), "maxval");
    if (w <= 0 || h <= 0) fail(Errc::malformed_header, "non-positive dimensions");
    if (maxval <= 0 || maxval > 65535) fail(Errc::unsupported_format, "maxval out of range");

    RgbImage img(static_cast<int>(h), static_cast<int>(w));
    const double scale = 1.0 / static_cast<double>(maxval);
    const std::size_t n = img.data.size();
    if (ascii) {
        for (std::size_t i = 0; i < n; ++i) {
            const long v = detail::parse_long(detail::next_token(in), "sample");
            if (v < 0 || v > maxval) fail(Errc::malformed_header, "sample out of range");
            img.data[i] = static_cast<double>(v) * scale;
        }
    } else {
        const int bytes_per = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(n * bytes_per);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            fail(Errc::io_failure, "truncated raster in '" + path + "'");
        for (std::size_t i = 0; i < n; ++i) {
            long v = bytes_per == 2 ? (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
            if (v > maxval) fail(Errc::malformed_header, "sample out of range");
            img.data[i] = static_cast<double>(v) * scale;
        }
    }
    for (double& v : img.data) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return img;
}

inline void save_rgb(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_failure, "cannot open '" + path + "' for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        double v = img.data[i];
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        raw[i] = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(Errc::io_failure, "write failed for '" + path + "'");
}

// FEAT: "FEAT <height> <width> <channels>\n" + h*w*c little-endian f32,
// row-major, channel-fastest.
inline FeatureMap load_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_failure, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) fail(Errc::malformed_header, "missing FEAT header");
    std::istringstream hdr(line);
    std::string magic;
    long h = 0, w = 0, c = 0;
    hdr >> magic >> h >> w >> c;
    if (magic != "FEAT" || !hdr) fail(Errc::malformed_header, "bad FEAT header '" + line + "'");
    if (h <= 0 || w <= 0 || c <= 0) fail(Errc::malformed_header, "non-positive FEAT dimensions");

    FeatureMap fm(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    std::vector<unsigned char> raw(fm.data.size() * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        fail(Errc::dimension_mismatch, "FEAT payload shorter than header promises");
    for (std::size_t i = 0; i < fm.data.size(); ++i) {
        const float f = detail::read_f32_le(raw.data() + 4 * i);
        if (!std::isfinite(f)) fail(Errc::non_finite, "non-finite feature value");
        fm.data[i] = static_cast<double>(f);
    }
    return fm;
}

inline void save_features(const FeatureMap& fm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_failure, "cannot open '" + path + "' for writing");
    out << "FEAT " << fm.height << " " << fm.width << " " << fm.channels << "\n";
    std::vector<unsigned char> raw(fm.data.size() * 4);
    for (std::size_t i = 0; i < fm.data.size(); ++i)
        detail::write_f32_le(raw.data() + 4 * i, static_cast<float>(fm.data[i]));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(Errc::io_failure, "write failed for '" + path + "'");
}

} // namespace gup
