#include <gup/bench.hpp>
#include <gup/metrics.hpp>
#include <gup/resample.hpp>
#include <gup/rng.hpp>
#include <gup/scene.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using Catch::Matchers::WithinAbs;
using gup::DownsampleNorm;
using gup::Image;
using gup::Method;
using gup::ScalePair;
using gup::SceneKind;

TEST_CASE("psnr of identical images hits the cap") {
    gup::Rng rng(91);
    const Image a = oracle::random_image(rng, 8, 8);
    CHECK(gup::psnr(a, a) == 99.0);
}

TEST_CASE("a uniform 0.1 offset scores exactly 20 dB") {
    Image a(16, 16, 0.4);
    Image b(16, 16, 0.5);
    CHECK_THAT(gup::psnr(a, b), WithinAbs(20.0, 1e-9));
    CHECK(gup::psnr(a, b) == gup::psnr(b, a));
}

TEST_CASE("psnr matches the naive oracle and respects the peak argument") {
    gup::Rng rng(92);
    const Image a = oracle::random_image(rng, 9, 7);
    const Image b = oracle::random_image(rng, 9, 7);
    CHECK_THAT(gup::psnr(a, b), WithinAbs(oracle::psnr_naive(a, b), 1e-10));
    CHECK_THAT(gup::psnr(a, b, 2.0), WithinAbs(oracle::psnr_naive(a, b, 2.0), 1e-10));
    CHECK(gup::psnr(a, b, 2.0) > gup::psnr(a, b));
}

TEST_CASE("psnr strictly decreases as noise grows") {
    gup::Rng rng(93);
    const Image a = oracle::random_image(rng, 12, 12);
    double prev = std::numeric_limits<double>::infinity();
    for (const double amp : {0.01, 0.03, 0.08, 0.15, 0.3}) {
        gup::Rng noise_rng(7);  // same noise pattern, scaled up
        Image b = a;
        for (double& v : b.data) v += amp * noise_rng.uniform(-1.0, 1.0);
        const double p = gup::psnr(a, b);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("psnr validates dimensions and peak") {
    using testutil::thrown_code;
    const Image a(4, 4, 0.5), b(4, 5, 0.5);
    CHECK(thrown_code([&] { gup::psnr(a, b); }) == gup::Errc::dimension_mismatch);
    const Image c(4, 4, 0.25);
    CHECK(thrown_code([&] { gup::psnr(a, c, 0.0); }) == gup::Errc::invalid_argument);
}

TEST_CASE("ssim of an image with itself is exactly one") {
    gup::Rng rng(94);
    const Image a = oracle::random_image(rng, 14, 13);
    CHECK(gup::ssim(a, a) == 1.0);
}

TEST_CASE("ssim matches the direct sliding-window oracle") {
    gup::Rng rng(95);
    const Image a = oracle::random_image(rng, 13, 16);
    const Image b = oracle::random_image(rng, 13, 16);
    CHECK_THAT(gup::ssim(a, b), WithinAbs(oracle::ssim_naive(a, b), 1e-10));
    CHECK(gup::ssim(a, b) == gup::ssim(b, a));
}

TEST_CASE("anticorrelated structure drives ssim negative") {
    Image a(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) a.at(r, c) = ((r / 2 + c / 2) % 2 == 0) ? 0.15 : 0.85;
    Image b = a;
    for (double& v : b.data) v = 1.0 - v;
    CHECK(gup::ssim(a, b) < 0.0);
}

TEST_CASE("ssim requires at least one full window") {
    using testutil::thrown_code;
    const Image small(10, 32, 0.5);
    CHECK(thrown_code([&] { gup::ssim(small, small); }) == gup::Errc::invalid_argument);
    const Image ok(11, 11, 0.5);
    CHECK(gup::ssim(ok, ok) == 1.0);
}

TEST_CASE("evaluating the truth against itself gives the perfect scores") {
    gup::Rng rng(96);
    const Image truth = oracle::random_image(rng, 16, 16);
    // identity-scale bicubic reconstruction is an exact copy of the input
    const gup::MetricReport m =
        gup::evaluate_pair(truth, truth, truth, Method::bicubic);
    CHECK(m.psnr_db == 99.0);
    CHECK(m.ssim == 1.0);
}

TEST_CASE("evaluate_pair composes the resampler with the metrics") {
    gup::Rng rng(97);
    const Image truth = oracle::random_image(rng, 16, 16);
    const gup::SparseOperator d =
        gup::build_downsample(ScalePair(16, 16, 4, 4), DownsampleNorm::averaging);
    const Image lowres = gup::detail::vector_as_image(d.apply(truth.data), 4, 4);

    const gup::MetricReport m = gup::evaluate_pair(lowres, truth, truth, Method::bicubic);
    const Image recon = gup::bicubic_upsample(lowres, 16, 16);
    CHECK(m.psnr_db == gup::psnr(recon, truth));
    CHECK(m.ssim == gup::ssim(recon, truth));

    CHECK(testutil::thrown_code([&] {
              const Image wrong(12, 16, 0.5);
              gup::evaluate_pair(lowres, truth, wrong, Method::bicubic);
          }) == gup::Errc::dimension_mismatch);
}

TEST_CASE("guided reconstruction reuses the guide structure the baseline cannot see") {
    const gup::ScenePair scene = gup::make_synthetic_scene(SceneKind::edges, 48, 4);
    const ScalePair shape(48, 48, 12, 12);
    const gup::SparseOperator d = gup::build_downsample(shape, DownsampleNorm::averaging);
    const Image lowres = gup::detail::vector_as_image(d.apply(scene.truth.data), 12, 12);

    gup::ModelParams model;  // lambda = eta = 0.1
    const gup::MetricReport guided =
        gup::evaluate_pair(lowres, scene.guide, scene.truth, Method::guided, model);
    const gup::MetricReport bicubic =
        gup::evaluate_pair(lowres, scene.guide, scene.truth, Method::bicubic);
    CHECK(guided.psnr_db > bicubic.psnr_db);
}

TEST_CASE("synthetic scenes are reproducible and in range") {
    const gup::ScenePair a = gup::make_synthetic_scene(SceneKind::gradient_blobs, 32, 123);
    const gup::ScenePair b = gup::make_synthetic_scene(SceneKind::gradient_blobs, 32, 123);
    CHECK(a.guide.data == b.guide.data);
    CHECK(a.truth.data == b.truth.data);
    CHECK(a.guide.height == 32);
    CHECK(a.truth.width == 32);
    for (double v : a.guide.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (double v : a.truth.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // a different seed draws a different scene
    const gup::ScenePair c = gup::make_synthetic_scene(SceneKind::gradient_blobs, 32, 124);
    CHECK(a.guide.data != c.guide.data);

    CHECK(testutil::thrown_code([] {
              gup::make_synthetic_scene(SceneKind::edges, 16, 1);
          }) == gup::Errc::invalid_argument);
}

TEST_CASE("every scene kind renders and parses by name") {
    for (const char* name : {"edges", "gradient_blobs", "checker"}) {
        const SceneKind kind = gup::scene_kind_from_string(name);
        CHECK(gup::to_string(kind) == name);
        const gup::RgbImage rgb = gup::make_scene_rgb(kind, 32, 9);
        CHECK(rgb.height == 32);
        for (double v : rgb.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    CHECK(testutil::thrown_code([] { gup::scene_kind_from_string("noise"); }) ==
          gup::Errc::invalid_argument);
}

TEST_CASE("order sweeps preserve the requested orders and are deterministic") {
    std::vector<gup::EvalScene> scenes;
    for (int i = 0; i < 2; ++i) {
        const gup::ScenePair pair = gup::make_synthetic_scene(SceneKind::edges, 32, 50 + i);
        const ScalePair shape(32, 32, 8, 8);
        const gup::SparseOperator d = gup::build_downsample(shape, DownsampleNorm::averaging);
        gup::EvalScene s;
        s.name = "scene_" + std::to_string(i);
        s.lowres = gup::detail::vector_as_image(d.apply(pair.truth.data), 8, 8);
        s.guide = pair.guide;
        s.truth = pair.truth;
        scenes.push_back(std::move(s));
    }

    const std::vector<double> orders{1.0, 1.5, 2.0};
    const auto table = gup::sweep_orders(scenes, orders, nullptr);
    REQUIRE(table.size() == orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        CHECK(table[i].order == orders[i]);
        CHECK(std::isfinite(table[i].mean_psnr_db));
        CHECK(table[i].mean_ssim <= 1.0);
    }

    const auto again = gup::sweep_orders(scenes, orders, nullptr);
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(table[i].mean_psnr_db == again[i].mean_psnr_db);
        CHECK(table[i].mean_ssim == again[i].mean_ssim);
    }

    CHECK(testutil::thrown_code([&] { gup::sweep_orders({}, orders, nullptr); }) ==
          gup::Errc::invalid_argument);
}

TEST_CASE("csv reports match the golden format") {
    std::vector<gup::ReportRow> rows;
    rows.push_back({"edges_000", "bicubic", 21.5, 0.75});
    rows.push_back({"edges_000", "guided", 24.25, 0.875});
    std::ostringstream out;
    gup::write_report_csv(out, rows);
    CHECK(out.str() ==
          "scene,method,psnr_db,ssim\n"
          "edges_000,bicubic,21.500000,0.750000\n"
          "edges_000,guided,24.250000,0.875000\n");
}
