#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gup/error.hpp"
#include "gup/graph.hpp"
#include "gup/rng.hpp"
#include "gup/solve.hpp"
#include "gup/sparse.hpp"

namespace gup {

// z solves A z = g on the forward operator A = D'D + lambda L (A symmetric,
// so the adjoint system is the forward system).
struct AdjointState {
    std::vector<double> z;
    std::vector<double> g;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

inline AdjointState solve_adjoint(const SystemSpec& spec, const std::vector<double>& g,
                                  double tol = 1e-8, int max_iter = 0) {
    require(static_cast<int>(g.size()) == spec.lap.n, Errc::dimension_mismatch,
            "gradient length != system size");
    std::vector<double> zero(static_cast<std::size_t>(spec.lap.n), 0.0);
    detail::CgOutcome cg = detail::cg_core(spec, g, std::move(zero), tol, max_iter, {});
    AdjointState st;
    st.z = std::move(cg.x);
    st.g = g;
    st.iterations = cg.iterations;
    st.relative_residual = cg.relative_residual;
    st.converged = cg.converged;
    return st;
}

// Differentiating (D'D + lambda L) x = D'y in lambda gives
// dx/dlambda = -A^{-1} (L x), hence g . dx/dlambda = -z'(L x).
inline double vjp_lambda(const SystemSpec& spec, const std::vector<double>& x,
                         const AdjointState& adjoint) {
    require(static_cast<int>(x.size()) == spec.lap.n, Errc::dimension_mismatch,
            "x length != system size");
    return -dot(adjoint.z, spec.lap.L.apply(x));
}

// Gradient w.r.t. each undirected affinity weight w_e, e = (a, b).
// Perturbing w_e moves L by (e_a - e_b)(e_a - e_b)', so
// dl/dw_e = -lambda (z_a - z_b)(x_a - x_b).
// The sign is frozen against the finite-difference oracle (regression-tested).
inline std::vector<double> vjp_affinity_edges(const SystemSpec& spec, const std::vector<double>& x,
                                              const AdjointState& adjoint) {
    require(static_cast<int>(x.size()) == spec.lap.n, Errc::dimension_mismatch,
            "x length != system size");
    std::vector<double> grads(spec.lap.edges.size());
    for (std::size_t e = 0; e < spec.lap.edges.size(); ++e) {
        const Edge& edge = spec.lap.edges[e];
        grads[e] = -spec.lambda * (adjoint.z[edge.a] - adjoint.z[edge.b]) * (x[edge.a] - x[edge.b]);
    }
    return grads;
}

// Chain through w = exp(-d/eta): dw/deta = w d / eta^2.
inline double vjp_eta(const std::vector<double>& edge_grads, const Laplacian& lap,
                      const FeatureMap& features, const AffinityParams& params) {
    require(edge_grads.size() == lap.edges.size(), Errc::dimension_mismatch,
            "edge gradient count != edge count");
    require(features.height == lap.height && features.width == lap.width,
            Errc::dimension_mismatch, "features shape != graph shape");
    const double eta2 = params.eta * params.eta;
    double acc = 0.0;
    for (std::size_t e = 0; e < lap.edges.size(); ++e) {
        const Edge& edge = lap.edges[e];
        const double d = feature_distance(features.pixel(static_cast<std::size_t>(edge.a)),
                                          features.pixel(static_cast<std::size_t>(edge.b)),
                                          features.channels, params.order);
        acc += edge_grads[e] * edge.weight * d / eta2;
    }
    return acc;
}

// Chain through w = exp(-d/eta) and d_o:
//   dw/dd = -w/eta,  dd/df_am = (o/F) sign(f_am - f_bm) |f_am - f_bm|^(o-1).
// Both endpoints of every edge accumulate; exact ties contribute the
// subgradient 0.
inline FeatureMap vjp_features(const std::vector<double>& edge_grads, const Laplacian& lap,
                               const FeatureMap& features, const AffinityParams& params) {
    require(edge_grads.size() == lap.edges.size(), Errc::dimension_mismatch,
            "edge gradient count != edge count");
    require(features.height == lap.height && features.width == lap.width,
            Errc::dimension_mismatch, "features shape != graph shape");
    const double o = params.order.o;
    const int channels = features.channels;
    FeatureMap out(features.height, features.width, channels, 0.0);
    for (std::size_t e = 0; e < lap.edges.size(); ++e) {
        const Edge& edge = lap.edges[e];
        const double common = edge_grads[e] * (-edge.weight / params.eta) * (o / channels);
        const double* fa = features.pixel(static_cast<std::size_t>(edge.a));
        const double* fb = features.pixel(static_cast<std::size_t>(edge.b));
        double* ga = out.pixel(static_cast<std::size_t>(edge.a));
        double* gb = out.pixel(static_cast<std::size_t>(edge.b));
        for (int m = 0; m < channels; ++m) {
            const double diff = fa[m] - fb[m];
            if (diff == 0.0) continue;
            const double s = (diff > 0.0 ? 1.0 : -1.0) * std::pow(std::fabs(diff), o - 1.0);
            ga[m] += common * s;
            gb[m] -= common * s;
        }
    }
    return out;
}

struct ParamGrads {
    double d_lambda = 0.0;
    double d_eta = 0.0;
    FeatureMap d_features;
    std::vector<double> d_W_edges;
};

// All four parameter-group VJPs from one adjoint solve.
inline ParamGrads backward(const SystemSpec& spec, const std::vector<double>& x,
                           const FeatureMap& features, const AffinityParams& params,
                           const std::vector<double>& g, double tol = 1e-8) {
    const AdjointState adjoint = solve_adjoint(spec, g, tol);
    ParamGrads grads;
    grads.d_W_edges = vjp_affinity_edges(spec, x, adjoint);
    grads.d_lambda = vjp_lambda(spec, x, adjoint);
    grads.d_eta = vjp_eta(grads.d_W_edges, spec.lap, features, params);
    grads.d_features = vjp_features(grads.d_W_edges, spec.lap, features, params);
    return grads;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check

struct GradCheckGroup {
    std::string name;
    double max_rel_err = 0.0;
    int compared = 0;
    bool pass = true;
};

struct GradCheckReport {
    std::vector<GradCheckGroup> groups;
    double threshold = 1e-4;
    bool all_pass = true;
};

struct GradCheckConfig {
    ScalePair dims{8, 8, 4, 4};
    int channels = 2;
    DistanceOrder order{1.5};
    double solver_tol = 1e-10;
    double threshold = 1e-4;
    // feature entries whose incident edges get this close are excluded from
    // the finite-difference comparison (|.|^(o-1) kinks)
    double near_tie = 1e-3;
    // central differences on an O(1) loss carry ~eps/(2h) = 2.5e-11 absolute
    // noise, so components below this can't support a 1e-4 relative check
    double fd_floor = 1e-6;
};

namespace detail {

inline double rel_err(double a, double b, double floor) {
    const double denom = std::max(std::fabs(a), std::fabs(b));
    if (denom <= floor) return 0.0;
    return std::fabs(a - b) / denom;
}

} // namespace detail

// Builds a seeded random instance, computes the MSE-to-target loss through
// the forward solve, and compares every analytic gradient group against
// central finite differences. Failures are reported, not thrown.
inline GradCheckReport check_gradients(std::uint64_t seed, const GradCheckConfig& cfg = {}) {
    Rng rng(seed);
    const int hh = cfg.dims.hi_height, hw = cfg.dims.hi_width;
    const int n = cfg.dims.hi_pixels();
    require(n <= 200, Errc::invalid_argument, "gradient check guarded to n <= 200");

    FeatureMap features(hh, hw, cfg.channels);
    for (double& v : features.data) v = rng.uniform();
    std::vector<double> y(static_cast<std::size_t>(cfg.dims.lo_pixels()));
    for (double& v : y) v = rng.uniform();
    std::vector<double> target(static_cast<std::size_t>(n));
    for (double& v : target) v = rng.uniform();
    const double lambda = rng.uniform(0.1, 1.0);
    const double eta = rng.uniform(0.2, 1.0);
    const AffinityParams params(eta, cfg.order);

    const SparseOperator D = build_downsample(cfg.dims, DownsampleNorm::averaging);

    auto loss_with = [&](const Laplacian& lap, double lam) {
        const SystemSpec spec(D, lap, lam, y, cfg.dims);
        const SolveResult sol = solve_dense(spec);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double diff = sol.x[i] - target[i];
            acc += diff * diff;
        }
        return acc / n;
    };

    const Laplacian lap = build_affinity_graph(features, params);
    const SystemSpec spec(D, lap, lambda, y, cfg.dims);
    const SolveResult forward = solve_cg(spec, cfg.solver_tol);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[i] = 2.0 * (forward.x[i] - target[i]) / n;

    const ParamGrads grads = backward(spec, forward.x, features, params, g, cfg.solver_tol);

    GradCheckReport report;
    report.threshold = cfg.threshold;

    auto push_group = [&](const std::string& name, double max_err, int compared) {
        GradCheckGroup group;
        group.name = name;
        group.max_rel_err = max_err;
        group.compared = compared;
        group.pass = max_err <= cfg.threshold;
        report.all_pass = report.all_pass && group.pass;
        report.groups.push_back(group);
    };

    {  // lambda
        const double h = 1e-5 * lambda;
        const double fd = (loss_with(lap, lambda + h) - loss_with(lap, lambda - h)) / (2.0 * h);
        push_group("lambda", detail::rel_err(grads.d_lambda, fd, cfg.fd_floor), 1);
    }

    {  // eta
        const double h = 1e-5 * eta;
        const Laplacian lap_p = build_affinity_graph(features, AffinityParams(eta + h, cfg.order));
        const Laplacian lap_m = build_affinity_graph(features, AffinityParams(eta - h, cfg.order));
        const double fd = (loss_with(lap_p, lambda) - loss_with(lap_m, lambda)) / (2.0 * h);
        push_group("eta", detail::rel_err(grads.d_eta, fd, cfg.fd_floor), 1);
    }

    {  // per-edge affinities
        double max_err = 0.0;
        const double h = 1e-6;
        for (std::size_t e = 0; e < lap.edges.size(); ++e) {
            std::vector<Edge> edges = lap.edges;
            edges[e].weight += h;
            const double lp = loss_with(assemble_laplacian(hh, hw, edges), lambda);
            edges[e].weight -= 2.0 * h;
            const double lm = loss_with(assemble_laplacian(hh, hw, std::move(edges)), lambda);
            const double fd = (lp - lm) / (2.0 * h);
            max_err = std::max(max_err, detail::rel_err(grads.d_W_edges[e], fd, cfg.fd_floor));
        }
        push_group("affinity_edges", max_err, static_cast<int>(lap.edges.size()));
    }

    {  // features
        double max_err = 0.0;
        int compared = 0;
        const double h = 1e-6;
        FeatureMap mutated = features;
        for (int i = 0; i < n; ++i) {
            for (int m = 0; m < cfg.channels; ++m) {
                bool near_tie = false;
                lap.W.for_each_in_row(i, [&](int j, double) {
                    const double diff = features.pixel(static_cast<std::size_t>(i))[m] -
                                        features.pixel(static_cast<std::size_t>(j))[m];
                    if (std::fabs(diff) <= cfg.near_tie) near_tie = true;
                });
                if (near_tie) continue;

                double& entry = mutated.pixel(static_cast<std::size_t>(i))[m];
                const double saved = entry;
                entry = saved + h;
                const double lp = loss_with(build_affinity_graph(mutated, params), lambda);
                entry = saved - h;
                const double lm = loss_with(build_affinity_graph(mutated, params), lambda);
                entry = saved;
                const double fd = (lp - lm) / (2.0 * h);
                const double analytic = grads.d_features.pixel(static_cast<std::size_t>(i))[m];
                max_err = std::max(max_err, detail::rel_err(analytic, fd, cfg.fd_floor));
                ++compared;
            }
        }
        push_group("features", max_err, compared);
    }

    return report;
}

} // namespace gup
