#pragma once

#include <cmath>
#include <vector>

#include "gup/error.hpp"
#include "gup/image.hpp"
#include "gup/sparse.hpp"

namespace gup {

// Exponent of the feature distance d_o. The sweep set is {1, 1.5, 2, 4, 10};
// 1.5 is the default working point.
struct DistanceOrder {
    double o = 1.5;

    DistanceOrder() = default;
    explicit DistanceOrder(double order) : o(order) {
        require(order > 0.0, Errc::invalid_argument, "distance order must be positive");
    }
};

struct AffinityParams {
    double eta = 0.1;
    DistanceOrder order;

    AffinityParams() = default;
    AffinityParams(double eta_, DistanceOrder order_) : eta(eta_), order(order_) {
        require(eta_ > 0.0, Errc::invalid_argument, "eta must be positive");
    }
};

// d_o(f_i, f_j) = (1/F) sum_m |f_im - f_jm|^o
inline double feature_distance(const double* fi, const double* fj, int channels,
                               DistanceOrder order) {
    double acc = 0.0;
    for (int m = 0; m < channels; ++m)
        acc += std::pow(std::fabs(fi[m] - fj[m]), order.o);
    return acc / channels;
}

inline double feature_distance(const std::vector<double>& fi, const std::vector<double>& fj,
                               DistanceOrder order) {
    require(fi.size() == fj.size() && !fi.empty(), Errc::dimension_mismatch,
            "feature vectors must have equal nonzero length");
    return feature_distance(fi.data(), fj.data(), static_cast<int>(fi.size()), order);
}

// Undirected 4-neighbor edge; a < b, enumerated row-major (right edge, then
// down edge, per pixel). This order is the edge indexing contract for
// per-edge gradients.
struct Edge {
    int a;
    int b;
    double weight;
};

// 4-neighbor affinity graph: W symmetric with entries exp(-d/eta),
// degree[i] = sum_j W[i][j], L = S - W.
struct Laplacian {
    int height = 0;
    int width = 0;
    int n = 0;
    std::vector<Edge> edges;
    SparseOperator W;
    std::vector<double> degree;
    SparseOperator L;
};

// Canonical 4-neighbor edge enumeration: row-major pixel order, right edge
// before down edge. Weights are left for the caller to fill.
inline std::vector<Edge> grid_edges(int height, int width) {
    require(static_cast<std::size_t>(height) * width >= 2, Errc::invalid_argument,
            "grid needs at least 2 pixels");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(2 * height * width));
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int i = r * width + c;
            if (c + 1 < width) edges.push_back({i, i + 1, 0.0});
            if (r + 1 < height) edges.push_back({i, i + width, 0.0});
        }
    }
    return edges;
}

// Builds W, degree and L from explicit edge weights. Symmetry is exact: each
// undirected weight is mirrored, never recomputed.
inline Laplacian assemble_laplacian(int height, int width, std::vector<Edge> edges) {
    Laplacian lap;
    lap.height = height;
    lap.width = width;
    lap.n = height * width;
    lap.edges = std::move(edges);

    std::vector<SparseOperator::Triplet> wt;
    wt.reserve(2 * lap.edges.size());
    for (const Edge& e : lap.edges) {
        wt.push_back({e.a, e.b, e.weight});
        wt.push_back({e.b, e.a, e.weight});
    }
    lap.W = SparseOperator::from_triplets(lap.n, lap.n, std::move(wt));

    // degree summed in CSR column order so it matches row_sum bit for bit
    lap.degree.resize(static_cast<std::size_t>(lap.n));
    for (int i = 0; i < lap.n; ++i) lap.degree[i] = lap.W.row_sum(i);

    std::vector<SparseOperator::Triplet> lt;
    lt.reserve(2 * lap.edges.size() + lap.n);
    for (int i = 0; i < lap.n; ++i) lt.push_back({i, i, lap.degree[i]});
    for (const Edge& e : lap.edges) {
        lt.push_back({e.a, e.b, -e.weight});
        lt.push_back({e.b, e.a, -e.weight});
    }
    lap.L = SparseOperator::from_triplets(lap.n, lap.n, std::move(lt));
    return lap;
}

inline Laplacian build_affinity_graph(const FeatureMap& features, const AffinityParams& params) {
    const int h = features.height, w = features.width;
    require(static_cast<std::size_t>(h) * w >= 2, Errc::invalid_argument,
            "affinity graph needs at least 2 pixels");
    require(all_finite(features.data), Errc::non_finite, "non-finite features");

    std::vector<Edge> edges = grid_edges(h, w);
    for (Edge& e : edges) {
        const double d = feature_distance(features.pixel(static_cast<std::size_t>(e.a)),
                                          features.pixel(static_cast<std::size_t>(e.b)),
                                          features.channels, params.order);
        e.weight = std::exp(-d / params.eta);
    }
    return assemble_laplacian(h, w, std::move(edges));
}

// x' L x
inline double laplacian_quadratic(const Laplacian& lap, const std::vector<double>& x) {
    require(static_cast<int>(x.size()) == lap.n, Errc::dimension_mismatch,
            "vector length != laplacian size");
    return dot(x, lap.L.apply(x));
}

} // namespace gup
