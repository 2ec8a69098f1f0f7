#include <gup/image_io.hpp>
#include <gup/rng.hpp>

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <string>

using gup::Errc;
using gup::FeatureMap;
using gup::Image;
using gup::RgbImage;
using testutil::read_bytes;
using testutil::scratch_path;
using testutil::thrown_code;
using testutil::write_bytes;

namespace {

std::string pfm_le(int w, int h, const std::vector<float>& bottom_up_rows) {
    std::string s = "Pf\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n";
    for (float f : bottom_up_rows) {
        unsigned char b[4];
        std::memcpy(b, &f, 4);  // host is little-endian
        s.append(reinterpret_cast<char*>(b), 4);
    }
    return s;
}

} // namespace

TEST_CASE("ascii pgm parses header and scales by maxval") {
    const std::string p = scratch_path("a.pgm");

    write_bytes(p, "P2\n1 1\n255\n255\n");
    Image one = gup::load_image(p);
    CHECK(one.height == 1);
    CHECK(one.width == 1);
    CHECK(one.at(0, 0) == 1.0);

    // header order is width then height: "2 1" is a single row of two pixels
    write_bytes(p, "P2\n2 1\n100\n0 50\n");
    Image row = gup::load_image(p);
    CHECK(row.height == 1);
    CHECK(row.width == 2);
    CHECK(row.at(0, 0) == 0.0);
    CHECK(row.at(0, 1) == 0.5);
}

TEST_CASE("ascii pgm tolerates comments and ragged whitespace") {
    const std::string p = scratch_path("comments.pgm");
    write_bytes(p, "P2 # magic\n# a comment line\n  2 # width\n\t2\n255\n0 128\n# more\n255\t64\n");
    Image img = gup::load_image(p);
    REQUIRE(img.height == 2);
    REQUIRE(img.width == 2);
    CHECK(img.at(0, 0) == 0.0);
    CHECK(img.at(0, 1) == 128.0 / 255.0);
    CHECK(img.at(1, 0) == 1.0);
    CHECK(img.at(1, 1) == 64.0 / 255.0);
}

TEST_CASE("binary pgm reads 8-bit and big-endian 16-bit samples") {
    const std::string p = scratch_path("b.pgm");

    write_bytes(p, std::string("P5\n2 1\n255\n") + '\x00' + '\xff');
    Image b8 = gup::load_image(p);
    CHECK(b8.at(0, 0) == 0.0);
    CHECK(b8.at(0, 1) == 1.0);

    // 16-bit samples are big-endian: 0x8000 = 32768
    std::string raw = "P5\n2 1\n65535\n";
    raw += '\x80';
    raw += '\x00';
    raw += '\xff';
    raw += '\xff';
    write_bytes(p, raw);
    Image b16 = gup::load_image(p);
    CHECK(b16.at(0, 0) == 32768.0 / 65535.0);
    CHECK(b16.at(0, 1) == 1.0);
}

TEST_CASE("pgm rejects malformed input with distinct codes") {
    const std::string p = scratch_path("bad.pgm");

    CHECK(thrown_code([] { gup::load_image("/nonexistent/nope.pgm"); }) == Errc::io_failure);

    write_bytes(p, "P7\n1 1\n255\n0\n");
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::unsupported_format);

    write_bytes(p, "P2\n1 1\n255\n300\n");  // sample above maxval
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::malformed_header);

    write_bytes(p, "P2\n0 1\n255\n");  // zero dimension
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::malformed_header);

    write_bytes(p, "P2\n1 1\n70000\n1\n");  // maxval beyond 16 bits
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::unsupported_format);

    write_bytes(p, std::string("P5\n2 2\n255\n") + '\x01');  // truncated raster
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::io_failure);
}

TEST_CASE("pgm16 save quantizes with round half up and clamps") {
    const std::string p = scratch_path("q.pgm");
    Image img(1, 4);
    img.at(0, 0) = 1.0;
    img.at(0, 1) = 0.5;
    img.at(0, 2) = -0.25;
    img.at(0, 3) = 1.5;
    gup::save_image(img, p, gup::SaveFormat::pgm16);

    const std::string bytes = read_bytes(p);
    const std::string header = "P5\n4 1\n65535\n";
    REQUIRE(bytes.size() == header.size() + 8);
    CHECK(bytes.compare(0, header.size(), header) == 0);
    auto sample = [&](int i) {
        const auto* u = reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
        return (static_cast<unsigned>(u[2 * i]) << 8) | u[2 * i + 1];
    };
    CHECK(sample(0) == 65535u);  // 1.0 hits full scale exactly
    CHECK(sample(1) == 32768u);  // 0.5 * 65535 = 32767.5 rounds up
    CHECK(sample(2) == 0u);
    CHECK(sample(3) == 65535u);
}

TEST_CASE("pgm16 roundtrip stays within one quantization step") {
    const std::string p = scratch_path("rt.pgm");
    gup::Rng rng(11);
    Image img(7, 5);
    for (double& v : img.data) v = rng.uniform();
    gup::save_image(img, p, gup::SaveFormat::pgm16);
    Image back = gup::load_image(p);
    REQUIRE(back.height == img.height);
    REQUIRE(back.width == img.width);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::fabs(back.data[i] - img.data[i]) <= 1.0 / 65535.0);
}

TEST_CASE("pfm roundtrip is exact for float-representable data") {
    const std::string p = scratch_path("rt.pfm");
    gup::Rng rng(12);
    Image img(6, 9);
    for (double& v : img.data) v = static_cast<float>(rng.uniform(-2.0, 2.0));
    gup::save_image(img, p, gup::SaveFormat::pfm);
    Image back = gup::load_image(p);
    REQUIRE(back.height == img.height);
    REQUIRE(back.width == img.width);
    CHECK(back.data == img.data);

    // save(load(file)) reproduces the canonical file byte for byte
    const std::string bytes1 = read_bytes(p);
    const std::string p2 = scratch_path("rt2.pfm");
    gup::save_image(back, p2, gup::SaveFormat::pfm);
    CHECK(read_bytes(p2) == bytes1);
}

TEST_CASE("pfm negative scale means little-endian rows stored bottom-up") {
    const std::string p = scratch_path("orient.pfm");
    // 1x2 grid (w=1, h=2): payload rows are bottom-up, so 5.0 is the lower row
    write_bytes(p, pfm_le(1, 2, {5.0f, 7.0f}));
    Image img = gup::load_image(p);
    REQUIRE(img.height == 2);
    REQUIRE(img.width == 1);
    CHECK(img.at(0, 0) == 7.0);
    CHECK(img.at(1, 0) == 5.0);
}

TEST_CASE("pfm positive scale means big-endian samples") {
    const std::string p = scratch_path("be.pfm");
    std::string s = "Pf\n1 1\n1.0\n";
    float f = 3.0f;
    unsigned char b[4];
    std::memcpy(b, &f, 4);
    for (int i = 3; i >= 0; --i) s += static_cast<char>(b[i]);  // byte-swapped
    write_bytes(p, s);
    Image img = gup::load_image(p);
    CHECK(img.at(0, 0) == 3.0);
}

TEST_CASE("pfm rejects color, zero scale, non-finite and short payloads") {
    const std::string p = scratch_path("bad.pfm");

    write_bytes(p, "PF\n1 1\n-1.0\n" + std::string(12, '\0'));
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::unsupported_format);

    write_bytes(p, "Pf\n1 1\n0.0\n" + std::string(4, '\0'));
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::malformed_header);

    write_bytes(p, pfm_le(1, 1, {std::numeric_limits<float>::infinity()}));
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::non_finite);

    write_bytes(p, pfm_le(2, 1, {1.0f}).substr(0, 14));  // promises 2 floats, holds < 1
    CHECK(thrown_code([&] { gup::load_image(p); }) == Errc::io_failure);
}

TEST_CASE("save rejects non-finite pixels") {
    Image img(1, 1);
    img.at(0, 0) = std::nan("");
    CHECK(thrown_code([&] {
              gup::save_image(img, scratch_path("nan.pfm"), gup::SaveFormat::pfm);
          }) == Errc::non_finite);
}

TEST_CASE("feature maps roundtrip through the packed float format") {
    const std::string p = scratch_path("f.feat");

    FeatureMap small(2, 2, 1);
    small.data = {0.25, -1.5, 3.0, 0.0};
    gup::save_features(small, p);
    FeatureMap back = gup::load_features(p);
    REQUIRE(back.height == 2);
    REQUIRE(back.width == 2);
    REQUIRE(back.channels == 1);
    CHECK(back.data == small.data);

    FeatureMap wide(1, 1, 64);
    for (int c = 0; c < 64; ++c) wide.data[c] = static_cast<float>(c) / 64.0f;
    gup::save_features(wide, p);
    FeatureMap wback = gup::load_features(p);
    REQUIRE(wback.channels == 64);
    CHECK(wback.data == wide.data);
}

TEST_CASE("feature loading validates header and payload length") {
    const std::string p = scratch_path("bad.feat");

    write_bytes(p, "FEAT 2 2 1\n" + std::string(8, '\0'));  // 16 bytes promised, 8 present
    CHECK(thrown_code([&] { gup::load_features(p); }) == Errc::dimension_mismatch);

    write_bytes(p, "FETA 1 1 1\n" + std::string(4, '\0'));
    CHECK(thrown_code([&] { gup::load_features(p); }) == Errc::malformed_header);

    write_bytes(p, "FEAT 0 1 1\n");
    CHECK(thrown_code([&] { gup::load_features(p); }) == Errc::malformed_header);

    std::string inf = "FEAT 1 1 1\n";
    float f = std::numeric_limits<float>::infinity();
    char b[4];
    std::memcpy(b, &f, 4);
    inf.append(b, 4);
    write_bytes(p, inf);
    CHECK(thrown_code([&] { gup::load_features(p); }) == Errc::non_finite);
}

TEST_CASE("ppm color images load from ascii and binary variants") {
    const std::string p = scratch_path("c.ppm");

    write_bytes(p, "P3\n1 2\n255\n255 0 0\n0 0 255\n");
    RgbImage a = gup::load_rgb(p);
    REQUIRE(a.height == 2);
    REQUIRE(a.width == 1);
    CHECK(a.pixel(0, 0)[0] == 1.0);
    CHECK(a.pixel(0, 0)[2] == 0.0);
    CHECK(a.pixel(1, 0)[2] == 1.0);

    gup::save_rgb(a, p);  // always written as binary P6
    const std::string bytes = read_bytes(p);
    CHECK(bytes.compare(0, 3, "P6\n") == 0);
    RgbImage b = gup::load_rgb(p);
    REQUIRE(b.height == 2);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        CHECK(std::fabs(a.data[i] - b.data[i]) <= 1.0 / 255.0);
}
