#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gup/gup.hpp"

namespace fs = std::filesystem;

namespace {

gup::SaveFormat format_for(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".pfm") return gup::SaveFormat::pfm;
    if (ext == ".pgm") return gup::SaveFormat::pgm16;
    gup::fail(gup::Errc::unsupported_format, "cannot infer output format from '" + path + "'");
}

gup::ModelParams load_model_or_default(const std::string& path) {
    if (path.empty()) return gup::ModelParams{};
    return gup::load_model(path);
}

// Scene triples on disk: <base>_guide.<ext>, <base>_low.<ext>, <base>_truth.<ext>
std::vector<gup::EvalScene> load_scene_dir(const std::string& dir) {
    std::vector<std::string> bases;
    std::map<std::string, std::string> ext_of;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        const auto pos = name.find("_guide.");
        if (pos == std::string::npos) continue;
        bases.push_back(name.substr(0, pos));
        ext_of[bases.back()] = name.substr(pos + 7);
    }
    std::sort(bases.begin(), bases.end());
    std::vector<gup::EvalScene> scenes;
    for (const std::string& base : bases) {
        const std::string ext = ext_of[base];
        const fs::path root = fs::path(dir);
        const fs::path low = root / (base + "_low." + ext);
        const fs::path truth = root / (base + "_truth." + ext);
        if (!fs::exists(low) || !fs::exists(truth)) continue;
        gup::EvalScene s;
        s.name = base;
        s.guide = gup::load_image((root / (base + "_guide." + ext)).string());
        s.lowres = gup::load_image(low.string());
        s.truth = gup::load_image(truth.string());
        scenes.push_back(std::move(s));
    }
    gup::require(!scenes.empty(), gup::Errc::invalid_argument,
                 "no scene triples (<base>_guide/_low/_truth) found in '" + dir + "'");
    return scenes;
}

std::vector<gup::RgbImage> load_rgb_dir(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".ppm") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<gup::RgbImage> images;
    images.reserve(paths.size());
    for (const std::string& p : paths) images.push_back(gup::load_rgb(p));
    gup::require(!images.empty(), gup::Errc::invalid_argument,
                 "no .ppm images found in '" + dir + "'");
    return images;
}

void cmd_upsample(const std::string& lowres_path, const std::string& guide_path,
                  const std::string& model_path, const std::string& out_path,
                  double order, double tol, bool verbose) {
    const gup::Image lowres = gup::load_image(lowres_path);
    const gup::Image guide = gup::load_image(guide_path);
    const gup::ModelParams model = load_model_or_default(model_path);
    gup::IterationCallback cb;
    if (verbose)
        cb = [](int k, double r) { std::fprintf(stderr, "iter %d residual %.6e\n", k, r); };
    const gup::UpsampleResult res =
        gup::upsample_guided(lowres, guide, model, gup::DistanceOrder(order), tol, 0, cb);
    if (verbose)
        std::fprintf(stderr, "%s after %d iterations, relative residual %.6e\n",
                     res.converged ? "converged" : "NOT converged", res.iterations,
                     res.relative_residual);
    gup::save_image(res.image, out_path, format_for(out_path));
}

void cmd_downsample(const std::string& in_path, double scale, const std::string& out_path,
                    const std::string& norm) {
    gup::require(scale >= 1.0, gup::Errc::invalid_argument, "scale must be >= 1");
    const gup::Image img = gup::load_image(in_path);
    const int lo_h = std::max(1, static_cast<int>(std::floor(img.height / scale)));
    const int lo_w = std::max(1, static_cast<int>(std::floor(img.width / scale)));
    const gup::ScalePair shape{img.height, img.width, lo_h, lo_w};
    const auto mode =
        norm == "raw" ? gup::DownsampleNorm::raw : gup::DownsampleNorm::averaging;
    const gup::SparseOperator D = gup::build_downsample(shape, mode);
    gup::Image out(lo_h, lo_w);
    out.data = D.apply(img.data);
    gup::save_image(out, out_path, format_for(out_path));
}

void cmd_eval(const std::string& scenes_dir, const std::string& model_path,
              const std::string& baseline, double order, const std::string& report_path) {
    const std::vector<gup::EvalScene> scenes = load_scene_dir(scenes_dir);
    const gup::ModelParams model = load_model_or_default(model_path);
    std::vector<gup::ReportRow> rows;
    for (const gup::EvalScene& s : scenes) {
        if (baseline == "bicubic") {
            const gup::MetricReport m =
                gup::evaluate_pair(s.lowres, s.guide, s.truth, gup::Method::bicubic);
            rows.push_back({s.name, "bicubic", m.psnr_db, m.ssim});
        }
        const gup::MetricReport m = gup::evaluate_pair(s.lowres, s.guide, s.truth,
                                                       gup::Method::guided, model,
                                                       gup::DistanceOrder(order));
        rows.push_back({s.name, "guided", m.psnr_db, m.ssim});
    }
    if (report_path.empty()) {
        gup::write_report_csv(std::cout, rows);
    } else {
        std::ofstream out(report_path, std::ios::binary);
        gup::require(out.good(), gup::Errc::io_failure, "cannot open '" + report_path + "'");
        gup::write_report_csv(out, rows);
    }
}

void cmd_sweep(const std::string& scenes_dir, const std::vector<double>& orders,
               const std::vector<std::string>& model_paths, const std::string& report_path) {
    const std::vector<gup::EvalScene> scenes = load_scene_dir(scenes_dir);
    gup::require(model_paths.empty() || model_paths.size() == orders.size(),
                 gup::Errc::invalid_argument, "--models must match --orders in count");
    auto model_for = [&](double o) -> gup::ModelParams {
        if (model_paths.empty()) return gup::ModelParams{};
        for (std::size_t i = 0; i < orders.size(); ++i)
            if (orders[i] == o) return gup::load_model(model_paths[i]);
        return gup::ModelParams{};
    };
    const std::vector<gup::SweepRow> table = gup::sweep_orders(scenes, orders, model_for);
    std::ostringstream out;
    out << "order,psnr_db,ssim\n";
    char buf[128];
    for (const gup::SweepRow& row : table) {
        std::snprintf(buf, sizeof buf, "%g,%.6f,%.6f", row.order, row.mean_psnr_db,
                      row.mean_ssim);
        out << buf << "\n";
    }
    if (report_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(report_path, std::ios::binary);
        gup::require(f.good(), gup::Errc::io_failure, "cannot open '" + report_path + "'");
        f << out.str();
    }
}

void cmd_augment(const std::string& in_path, std::uint64_t seed, int anchors,
                 const std::string& guide_path, const std::string& target_path) {
    const gup::RgbImage rgb = gup::load_rgb(in_path);
    gup::AugmentSpec spec;
    spec.anchor_count = anchors;
    spec.seed = seed;
    const auto [guide, target] = gup::augment_cross_spectral(rgb, spec);
    gup::save_image(guide, guide_path, format_for(guide_path));
    gup::save_image(target, target_path, format_for(target_path));
}

void cmd_train(const std::string& data_dir, int steps, std::uint64_t seed,
               const std::string& out_path, const std::string& provider, double lr,
               int patch, int scale, double order, bool learn_transform,
               const std::string& trace_path, bool verbose) {
    const std::vector<gup::RgbImage> dataset = load_rgb_dir(data_dir);
    gup::TrainConfig config;
    config.learning_rate = lr;
    config.steps = steps;
    config.patch_size = patch;
    config.scale_factor = scale;
    config.seed = seed;

    gup::ModelParams init;
    init.provider = gup::parse_provider(provider);
    if (learn_transform) {
        const int f = gup::provider_channel_count(init.provider);
        init.transform = gup::LinearTransform(f, f);
    }

    gup::TrainCallback cb;
    if (verbose)
        cb = [](int step, double loss) { std::fprintf(stderr, "step %d loss %.6e\n", step, loss); };
    const gup::TrainResult result =
        gup::train(dataset, config, init, gup::DistanceOrder(order), cb);

    gup::save_model(result.params, out_path);
    if (!trace_path.empty()) {
        std::ofstream f(trace_path, std::ios::binary);
        gup::require(f.good(), gup::Errc::io_failure, "cannot open '" + trace_path + "'");
        f << "step,loss\n";
        for (std::size_t i = 0; i < result.loss_trace.size(); ++i)
            f << i << "," << gup::detail::format_double(result.loss_trace[i]) << "\n";
    }
    if (result.aborted)
        std::fprintf(stderr, "training aborted after three consecutive solver failures\n");
    std::fprintf(stderr, "trained %zu steps (%zu failed), lambda %.6g eta %.6g\n",
                 result.loss_trace.size(), result.failed_steps.size(),
                 result.params.lambda(), result.params.eta());
}

int cmd_gradcheck(std::uint64_t seed, double order) {
    gup::GradCheckConfig cfg;
    cfg.order = gup::DistanceOrder(order);
    const gup::GradCheckReport report = gup::check_gradients(seed, cfg);
    for (const gup::GradCheckGroup& g : report.groups)
        std::printf("%s %.6e %s\n", g.name.c_str(), g.max_rel_err, g.pass ? "pass" : "fail");
    return report.all_pass ? 0 : 1;
}

void cmd_scenes(const std::string& out_dir, int count, int size, int scale,
                const std::string& kind, std::uint64_t seed) {
    const gup::SceneKind k = gup::scene_kind_from_string(kind);
    fs::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%03d", kind.c_str(), i);
        const std::uint64_t scene_seed = seed + static_cast<std::uint64_t>(i);

        gup::Rng rng(scene_seed);
        const gup::RgbImage rgb = gup::make_scene_rgb(k, size, rng.next_u64());
        gup::AugmentSpec spec;
        spec.seed = rng.next_u64();
        const auto [guide, truth] = gup::augment_cross_spectral(rgb, spec);

        const gup::ScalePair shape{size, size, std::max(1, size / scale),
                                   std::max(1, size / scale)};
        const gup::SparseOperator D =
            gup::build_downsample(shape, gup::DownsampleNorm::averaging);
        gup::Image low(shape.lo_height, shape.lo_width);
        low.data = D.apply(truth.data);

        const fs::path root(out_dir);
        gup::save_rgb(rgb, (root / (std::string(name) + "_rgb.ppm")).string());
        gup::save_image(guide, (root / (std::string(name) + "_guide.pgm")).string(),
                        gup::SaveFormat::pgm16);
        gup::save_image(truth, (root / (std::string(name) + "_truth.pgm")).string(),
                        gup::SaveFormat::pgm16);
        gup::save_image(low, (root / (std::string(name) + "_low.pgm")).string(),
                        gup::SaveFormat::pgm16);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"guided upsampling engine"};
    app.require_subcommand(1);

    // upsample
    std::string lowres_path, guide_path, model_path, out_path;
    double order = 1.5, tol = 1e-8;
    bool verbose = false;
    auto* up = app.add_subcommand("upsample", "reconstruct a high-res image from lowres + guide");
    up->add_option("--lowres", lowres_path, "low-res input image")->required();
    up->add_option("--guide", guide_path, "high-res guide image")->required();
    up->add_option("--model", model_path, "model checkpoint (default: untrained parameters)");
    up->add_option("--out", out_path, "output image (.pgm or .pfm)")->required();
    up->add_option("--order", order, "distance order o");
    up->add_option("--tol", tol, "solver relative-residual tolerance");
    up->add_flag("--verbose", verbose, "per-iteration residuals on stderr");

    // downsample
    std::string ds_in, ds_out, ds_norm = "averaging";
    double ds_scale = 8.0;
    auto* down = app.add_subcommand("downsample", "apply the area-overlap downsampling operator");
    down->add_option("--in", ds_in, "input image")->required();
    down->add_option("--scale", ds_scale, "scale factor (may be fractional)")->required();
    down->add_option("--out", ds_out, "output image")->required();
    down->add_option("--norm", ds_norm, "averaging|raw")
        ->check(CLI::IsMember({"averaging", "raw"}));

    // eval
    std::string ev_scenes, ev_model, ev_baseline = "bicubic", ev_report;
    double ev_order = 1.5;
    auto* ev = app.add_subcommand("eval", "score methods on a scene directory, CSV out");
    ev->add_option("--scenes", ev_scenes, "directory of <base>_guide/_low/_truth images")
        ->required();
    ev->add_option("--model", ev_model, "model checkpoint for the guided method");
    ev->add_option("--baseline", ev_baseline, "bicubic|none")
        ->check(CLI::IsMember({"bicubic", "none"}));
    ev->add_option("--order", ev_order, "distance order o");
    ev->add_option("--report", ev_report, "CSV output path (default: stdout)");

    // sweep
    std::string sw_scenes, sw_report;
    std::vector<double> sw_orders{1.0, 1.5, 2.0, 4.0, 10.0};
    std::vector<std::string> sw_models;
    auto* sw = app.add_subcommand("sweep", "compare distance orders on a scene directory");
    sw->add_option("--scenes", sw_scenes, "scene directory")->required();
    sw->add_option("--orders", sw_orders, "comma-separated order values")->delimiter(',');
    sw->add_option("--models", sw_models, "one checkpoint per order")->delimiter(',');
    sw->add_option("--report", sw_report, "CSV output path (default: stdout)");

    // augment
    std::string au_in, au_guide, au_target;
    std::uint64_t au_seed = 0;
    int au_anchors = 6;
    auto* au = app.add_subcommand("augment", "cross-spectral guide/target pair from an RGB image");
    au->add_option("--in", au_in, "RGB input (.ppm)")->required();
    au->add_option("--seed", au_seed, "RNG seed");
    au->add_option("--anchors", au_anchors, "anchor hue count");
    au->add_option("--out-guide", au_guide, "guide output image")->required();
    au->add_option("--out-target", au_target, "target output image")->required();

    // train
    std::string tr_data, tr_out, tr_provider = "intensity_gradient", tr_trace;
    int tr_steps = 200, tr_patch = 64, tr_scale = 8;
    std::uint64_t tr_seed = 0;
    double tr_lr = 0.0001, tr_order = 1.5;
    bool tr_transform = false, tr_verbose = false;
    auto* tr = app.add_subcommand("train", "fit lambda/eta (and optional feature transform)");
    tr->add_option("--data", tr_data, "directory of RGB .ppm training images")->required();
    tr->add_option("--steps", tr_steps, "Adam steps");
    tr->add_option("--seed", tr_seed, "RNG seed");
    tr->add_option("--out", tr_out, "checkpoint output path")->required();
    tr->add_option("--provider", tr_provider, "intensity|intensity_gradient|patch3|external:PATH");
    tr->add_option("--lr", tr_lr, "learning rate");
    tr->add_option("--patch", tr_patch, "training patch size");
    tr->add_option("--scale", tr_scale, "downsampling factor");
    tr->add_option("--order", tr_order, "distance order o");
    tr->add_flag("--transform", tr_transform, "learn an identity-initialized feature transform");
    tr->add_option("--trace", tr_trace, "write the loss trace as CSV");
    tr->add_flag("--verbose", tr_verbose, "per-step losses on stderr");

    // gradcheck
    std::uint64_t gc_seed = 0;
    double gc_order = 1.5;
    auto* gc = app.add_subcommand("gradcheck", "analytic vs finite-difference gradients");
    gc->add_option("--seed", gc_seed, "RNG seed");
    gc->add_option("--order", gc_order, "distance order o");

    // scenes
    std::string sc_out, sc_kind = "edges";
    int sc_count = 10, sc_size = 128, sc_scale = 8;
    std::uint64_t sc_seed = 0;
    auto* sc = app.add_subcommand("scenes", "generate synthetic evaluation scenes");
    sc->add_option("--out", sc_out, "output directory")->required();
    sc->add_option("--count", sc_count, "number of scenes");
    sc->add_option("--size", sc_size, "truth image side length");
    sc->add_option("--scale", sc_scale, "downsampling factor for the low-res input");
    sc->add_option("--kind", sc_kind, "edges|gradient_blobs|checker")
        ->check(CLI::IsMember({"edges", "gradient_blobs", "checker"}));
    sc->add_option("--seed", sc_seed, "base RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (up->parsed())
            cmd_upsample(lowres_path, guide_path, model_path, out_path, order, tol, verbose);
        else if (down->parsed())
            cmd_downsample(ds_in, ds_scale, ds_out, ds_norm);
        else if (ev->parsed())
            cmd_eval(ev_scenes, ev_model, ev_baseline, ev_order, ev_report);
        else if (sw->parsed())
            cmd_sweep(sw_scenes, sw_orders, sw_models, sw_report);
        else if (au->parsed())
            cmd_augment(au_in, au_seed, au_anchors, au_guide, au_target);
        else if (tr->parsed())
            cmd_train(tr_data, tr_steps, tr_seed, tr_out, tr_provider, tr_lr, tr_patch,
                      tr_scale, tr_order, tr_transform, tr_trace, tr_verbose);
        else if (gc->parsed())
            return cmd_gradcheck(gc_seed, gc_order);
        else if (sc->parsed())
            cmd_scenes(sc_out, sc_count, sc_size, sc_scale, sc_kind, sc_seed);
    } catch (const gup::Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", gup::errc_name(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
