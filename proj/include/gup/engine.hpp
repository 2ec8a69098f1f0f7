#pragma once

#include <utility>

#include "gup/features.hpp"
#include "gup/graph.hpp"
#include "gup/image.hpp"
#include "gup/model.hpp"
#include "gup/resample.hpp"
#include "gup/solve.hpp"

namespace gup {

struct UpsampleResult {
    Image image;
    int iterations = 0;
    double relative_residual = 0.0;
    double objective = 0.0;
    bool converged = false;
};

// Full reconstruction pipeline: guide features -> affinity graph ->
// regularized least squares against the downsampled-to-lowres constraint.
inline UpsampleResult upsample_guided(const Image& lowres, const Image& guide,
                                      const ModelParams& model,
                                      DistanceOrder order = {},
                                      double tol = 1e-8, int max_iter = 0,
                                      const IterationCallback& on_iteration = nullptr) {
    require(guide.height >= lowres.height && guide.width >= lowres.width,
            Errc::dimension_mismatch, "guide must be at least lowres-sized");
    const ScalePair shape{guide.height, guide.width, lowres.height, lowres.width};
    const SparseOperator D = build_downsample(shape, DownsampleNorm::averaging);
    const FeatureMap features =
        make_features(guide, model.provider, model.transform ? &*model.transform : nullptr);
    const Laplacian lap = build_affinity_graph(features, AffinityParams{model.eta(), order});
    const SystemSpec spec{D, lap, model.lambda(), lowres.data, shape};
    SolveResult sol = solve_cg(spec, tol, max_iter, on_iteration);

    UpsampleResult out;
    out.image = Image(guide.height, guide.width);
    out.image.data = std::move(sol.x);
    out.iterations = sol.iterations;
    out.relative_residual = sol.relative_residual;
    out.objective = sol.objective;
    out.converged = sol.converged;
    return out;
}

} // namespace gup
