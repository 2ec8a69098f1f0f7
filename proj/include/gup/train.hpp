#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gup/adam.hpp"
#include "gup/augment.hpp"
#include "gup/error.hpp"
#include "gup/features.hpp"
#include "gup/grad.hpp"
#include "gup/graph.hpp"
#include "gup/image.hpp"
#include "gup/model.hpp"
#include "gup/resample.hpp"
#include "gup/rng.hpp"
#include "gup/solve.hpp"

namespace gup {

struct TrainConfig {
    double learning_rate = 0.0001;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int steps = 200;
    int patch_size = 64;
    int scale_factor = 8;
    std::uint64_t seed = 0;
};

struct TrainResult {
    ModelParams params;        // snapshot with the lowest smoothed loss
    ModelParams final_params;  // state after the last step
    std::vector<double> loss_trace;
    std::vector<int> failed_steps;
    bool aborted = false;  // three consecutive solver failures
};

using TrainCallback = std::function<void(int step, double loss)>;

namespace detail {

inline RgbImage crop_rgb(const RgbImage& img, int r0, int c0, int h, int w) {
    RgbImage out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double* src = img.pixel(r0 + r, c0 + c);
            double* dst = out.pixel(r, c);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    return out;
}

inline std::vector<double> pack_params(const ModelParams& p) {
    std::vector<double> v{p.theta_lambda, p.theta_eta};
    if (p.transform) v.insert(v.end(), p.transform->m.begin(), p.transform->m.end());
    return v;
}

inline void unpack_params(const std::vector<double>& v, ModelParams& p) {
    p.theta_lambda = v[0];
    p.theta_eta = v[1];
    if (p.transform) std::copy(v.begin() + 2, v.end(), p.transform->m.begin());
}

} // namespace detail

// Stochastic training loop: per step, augment a random patch into a
// (guide, target) pair, fit the reconstruction, and Adam-update the
// parameters with gradients from the adjoint solve.
inline TrainResult train(const std::vector<RgbImage>& dataset, const TrainConfig& config,
                         const ModelParams& init, DistanceOrder order = {},
                         const TrainCallback& on_step = nullptr) {
    require(!dataset.empty(), Errc::invalid_argument, "training dataset is empty");
    require(config.steps >= 0, Errc::invalid_argument, "steps must be nonnegative");
    require(config.patch_size >= 2, Errc::invalid_argument, "patch size must be at least 2");
    require(config.scale_factor >= 1, Errc::invalid_argument, "scale factor must be at least 1");
    for (const RgbImage& img : dataset)
        require(img.height >= 2 && img.width >= 2, Errc::invalid_argument,
                "training images must be at least 2x2");

    const double solver_tol = 1e-8;
    ModelParams model = init;
    std::vector<double> theta = detail::pack_params(model);
    AdamOptimizer adam(
        {config.learning_rate, config.beta1, config.beta2, config.epsilon}, theta.size());
    Rng rng(config.seed);

    TrainResult result;
    result.params = model;
    double smoothed = 0.0;
    double best_smoothed = 0.0;
    bool have_loss = false;
    int consecutive_failures = 0;

    for (int step = 0; step < config.steps; ++step) {
        const RgbImage& img =
            dataset[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(dataset.size()) - 1))];
        const int ph = std::min(config.patch_size, img.height);
        const int pw = std::min(config.patch_size, img.width);
        const int r0 = rng.uniform_int(0, img.height - ph);
        const int c0 = rng.uniform_int(0, img.width - pw);
        const RgbImage patch = detail::crop_rgb(img, r0, c0, ph, pw);

        AugmentSpec aug;
        aug.seed = rng.next_u64();
        auto [guide, target] = augment_cross_spectral(patch, aug);

        const ScalePair shape{ph, pw, std::max(1, ph / config.scale_factor),
                              std::max(1, pw / config.scale_factor)};
        const SparseOperator D = build_downsample(shape, DownsampleNorm::averaging);
        const std::vector<double> y = D.apply(target.data);

        const FeatureMap raw = provider_features(guide, model.provider);
        const FeatureMap feats =
            model.transform ? apply_transform(raw, *model.transform) : raw;
        const AffinityParams affinity{model.eta(), order};
        const Laplacian lap = build_affinity_graph(feats, affinity);
        const SystemSpec spec{D, lap, model.lambda(), y, shape};

        SolveResult sol;
        bool ok = true;
        try {
            sol = solve_cg(spec, solver_tol);
            ok = sol.converged;
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) {
            result.failed_steps.push_back(step);
            if (++consecutive_failures >= 3) {
                result.aborted = true;
                break;
            }
            continue;
        }
        consecutive_failures = 0;

        const std::size_t n = sol.x.size();
        double loss = 0.0;
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sol.x[i] - target.data[i];
            loss += d * d;
            g[i] = 2.0 * d / static_cast<double>(n);
        }
        loss /= static_cast<double>(n);
        result.loss_trace.push_back(loss);
        if (on_step) on_step(step, loss);

        const ParamGrads grads = backward(spec, sol.x, feats, affinity, g, solver_tol);
        std::vector<double> dtheta(theta.size(), 0.0);
        dtheta[0] = grads.d_lambda * model.lambda();  // chain through lambda = exp(theta)
        dtheta[1] = grads.d_eta * model.eta();
        if (model.transform) {
            const std::vector<double> dm =
                vjp_transform(raw, grads.d_features, *model.transform);
            std::copy(dm.begin(), dm.end(), dtheta.begin() + 2);
        }

        smoothed = have_loss ? 0.9 * smoothed + 0.1 * loss : loss;
        if (!have_loss || smoothed < best_smoothed) {
            best_smoothed = smoothed;
            result.params = model;  // the state that produced this loss
        }
        have_loss = true;

        adam.step(theta, dtheta);
        detail::unpack_params(theta, model);
    }

    result.final_params = model;
    if (!have_loss) result.params = model;
    return result;
}

inline TrainResult train(const std::vector<RgbImage>& dataset, const TrainConfig& config,
                         const std::string& provider, DistanceOrder order = {},
                         const TrainCallback& on_step = nullptr) {
    ModelParams init;
    init.provider = parse_provider(provider);
    return train(dataset, config, init, order, on_step);
}

} // namespace gup
