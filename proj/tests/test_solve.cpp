#include <gup/grad.hpp>
#include <gup/resample.hpp>
#include <gup/rng.hpp>
#include <gup/solve.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using Catch::Matchers::WithinAbs;
using gup::AffinityParams;
using gup::DistanceOrder;
using gup::DownsampleNorm;
using gup::FeatureMap;
using gup::Laplacian;
using gup::ScalePair;
using gup::SparseOperator;
using gup::SystemSpec;

namespace {

// Owns everything a SystemSpec references.
struct Instance {
    ScalePair shape;
    SparseOperator D;
    FeatureMap features;
    Laplacian lap;
    std::vector<double> y;
    double lambda = 0.0;

    SystemSpec spec() const { return SystemSpec(D, lap, lambda, y, shape); }
};

Instance make_instance(gup::Rng& rng, ScalePair shape, double lambda, double eta = 0.2,
                       bool constant_features = false) {
    Instance inst;
    inst.shape = shape;
    inst.D = gup::build_downsample(shape, DownsampleNorm::averaging);
    inst.features = constant_features
                        ? FeatureMap(shape.hi_height, shape.hi_width, 2, 0.5)
                        : oracle::random_features(rng, shape.hi_height, shape.hi_width, 2);
    inst.lap = gup::build_affinity_graph(inst.features, AffinityParams(eta, DistanceOrder(1.5)));
    inst.y.resize(static_cast<std::size_t>(shape.lo_pixels()));
    for (double& v : inst.y) v = rng.uniform();
    inst.lambda = lambda;
    return inst;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

// Dense assembly of D'D + lambda L for the oracle comparisons.
oracle::Dense dense_system(const SystemSpec& spec) {
    const int n = spec.lap.n;
    const auto dd = oracle::dense_of(spec.D);
    const auto ll = oracle::dense_of(spec.lap.L);
    oracle::Dense a(static_cast<std::size_t>(n), std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < spec.D.rows(); ++l) s += dd[l][i] * dd[l][j];
            a[i][j] = s + spec.lambda * ll[i][j];
        }
    return a;
}

} // namespace

TEST_CASE("system apply reduces to the input when D is the identity and lambda is 0") {
    gup::Rng rng(31);
    Instance inst = make_instance(rng, ScalePair(3, 3, 3, 3), 0.0);
    const SystemSpec spec = inst.spec();
    std::vector<double> v(9);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    const auto out = gup::system_apply(spec, v);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK_THAT(out[i], WithinAbs(v[i], 1e-15));
}

TEST_CASE("constant vectors pass through the smoothness term untouched") {
    gup::Rng rng(32);
    Instance inst = make_instance(rng, ScalePair(6, 6, 3, 3), 2.5);
    const SystemSpec spec = inst.spec();
    const std::vector<double> v(36, 0.8);
    const auto got = gup::system_apply(spec, v);
    const auto want = inst.D.apply_transpose(inst.D.apply(v));  // L v = 0 on constants
    for (std::size_t i = 0; i < v.size(); ++i) CHECK_THAT(got[i], WithinAbs(want[i], 1e-12));
}

TEST_CASE("system apply matches the dense assembled matrix") {
    gup::Rng rng(33);
    Instance inst = make_instance(rng, ScalePair(6, 5, 3, 2), 0.7);
    const SystemSpec spec = inst.spec();
    const auto a = dense_system(spec);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(spec.lap.n));
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        const auto got = gup::system_apply(spec, v);
        const auto want = oracle::matvec(a, v);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK_THAT(got[i], WithinAbs(want[i], 1e-10));
    }
}

TEST_CASE("the system matrix is positive definite") {
    gup::Rng rng(34);
    Instance inst = make_instance(rng, ScalePair(6, 6, 2, 2), 0.4);
    const SystemSpec spec = inst.spec();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(36);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        if (gup::norm2(v) == 0.0) continue;
        CHECK(gup::dot(v, gup::system_apply(spec, v)) > 0.0);
    }
}

TEST_CASE("identity problem at lambda 0 returns the data unchanged") {
    gup::Rng rng(35);
    Instance inst = make_instance(rng, ScalePair(4, 4, 4, 4), 0.0);
    const gup::SolveResult res = gup::solve_cg(inst.spec(), 1e-10);
    CHECK(res.converged);
    CHECK(res.x == inst.y);  // bicubic warm start at scale 1 is already exact
}

TEST_CASE("cg agrees with a dense direct solve") {
    gup::Rng rng(36);
    for (int trial = 0; trial < 10; ++trial) {
        Instance inst = make_instance(rng, ScalePair(6, 6, 3, 3), rng.uniform(0.05, 2.0),
                                      rng.uniform(0.1, 0.5));
        const SystemSpec spec = inst.spec();
        const gup::SolveResult cg = gup::solve_cg(spec, 1e-10);
        const gup::SolveResult direct = gup::solve_dense(spec);
        REQUIRE(cg.converged);

        double xmax = 0.0;
        for (double v : direct.x) xmax = std::max(xmax, std::fabs(v));
        CHECK(max_abs_diff(cg.x, direct.x) <= 1e-6 * std::max(1.0, xmax));
    }
}

TEST_CASE("huge lambda forces the constant least-squares fit") {
    gup::Rng rng(37);
    Instance inst = make_instance(rng, ScalePair(6, 6, 3, 3), 1e8, 0.2, true);
    const gup::SolveResult res = gup::solve_cg(inst.spec(), 1e-8);

    const auto [lo, hi] = std::minmax_element(res.x.begin(), res.x.end());
    CHECK(*hi - *lo <= 1e-4);

    // rows of averaging D sum to 1, so the best constant is the mean of y
    const double c = std::accumulate(inst.y.begin(), inst.y.end(), 0.0) /
                     static_cast<double>(inst.y.size());
    for (double v : res.x) CHECK_THAT(v, WithinAbs(c, 1e-4));
}

TEST_CASE("objective evaluates the data plus smoothness decomposition") {
    gup::Rng rng(38);
    Instance inst = make_instance(rng, ScalePair(4, 4, 2, 2), 0.6);
    const SystemSpec spec = inst.spec();

    std::vector<double> x(16);
    for (double& v : x) v = rng.uniform();
    double data = 0.0;
    const auto dx = inst.D.apply(x);
    for (std::size_t i = 0; i < dx.size(); ++i) {
        const double r = dx[i] - inst.y[i];
        data += r * r;
    }
    const double want = data + inst.lambda * oracle::pairwise_quadratic(inst.lap, x);
    CHECK_THAT(gup::objective(spec, x), WithinAbs(want, 1e-10 * std::max(1.0, want)));
}

TEST_CASE("objective of an exactly interpolating constant is the smoothness cost only") {
    gup::Rng rng(39);
    Instance inst = make_instance(rng, ScalePair(4, 4, 2, 2), 0.6);
    inst.y.assign(inst.y.size(), 0.5);
    const SystemSpec spec = inst.spec();
    const std::vector<double> x(16, 0.5);  // D x = y exactly, L x = 0
    CHECK_THAT(gup::objective(spec, x), WithinAbs(0.0, 1e-12));
}

TEST_CASE("the solver minimizes the objective") {
    gup::Rng rng(40);
    Instance inst = make_instance(rng, ScalePair(8, 8, 4, 4), 0.5);
    const SystemSpec spec = inst.spec();
    const gup::SolveResult res = gup::solve_cg(spec, 1e-10);
    REQUIRE(res.converged);

    const gup::Image warm = gup::bicubic_upsample(
        gup::detail::vector_as_image(inst.y, 4, 4), 8, 8);
    CHECK(res.objective <= gup::objective(spec, warm.data));

    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> perturbed = res.x;
        for (double& v : perturbed) v += rng.uniform(-1e-3, 1e-3);
        CHECK(res.objective <= gup::objective(spec, perturbed));
    }
}

TEST_CASE("solutions vary continuously in lambda") {
    gup::Rng rng(41);
    Instance inst = make_instance(rng, ScalePair(6, 6, 3, 3), 1.0);
    std::vector<double> step_sizes;
    std::vector<double> prev;
    for (int k = 0; k <= 5; ++k) {
        inst.lambda = std::ldexp(1.0, -k);  // 1, 1/2, ..., 1/32
        const gup::SolveResult res = gup::solve_cg(inst.spec(), 1e-10);
        REQUIRE(res.converged);
        if (!prev.empty()) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                const double d = res.x[i] - prev[i];
                d2 += d * d;
            }
            step_sizes.push_back(std::sqrt(d2));
        }
        prev = res.x;
    }
    // halving lambda moves the solution by roughly half as much each time
    for (std::size_t k = 1; k < step_sizes.size(); ++k)
        CHECK(step_sizes[k] <= step_sizes[k - 1] * 1.1);
}

TEST_CASE("tighter tolerances are honored") {
    gup::Rng rng(42);
    Instance inst = make_instance(rng, ScalePair(6, 6, 3, 3), 0.5);
    const SystemSpec spec = inst.spec();
    int prev_iters = 0;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        const gup::SolveResult res = gup::solve_cg(spec, tol);
        REQUIRE(res.converged);
        CHECK(res.relative_residual <= tol);
        CHECK(res.iterations >= prev_iters);
        prev_iters = res.iterations;
    }
}

TEST_CASE("solving twice is bit-identical") {
    gup::Rng rng(43);
    Instance inst = make_instance(rng, ScalePair(8, 6, 4, 3), 0.3);
    const gup::SolveResult a = gup::solve_cg(inst.spec(), 1e-9);
    const gup::SolveResult b = gup::solve_cg(inst.spec(), 1e-9);
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("iteration callback reports monotone progress points") {
    gup::Rng rng(44);
    Instance inst = make_instance(rng, ScalePair(8, 8, 2, 2), 0.5);
    std::vector<int> iters;
    std::vector<double> residuals;
    const gup::SolveResult res = gup::solve_cg(inst.spec(), 1e-10, 0, [&](int k, double r) {
        iters.push_back(k);
        residuals.push_back(r);
    });
    REQUIRE(res.converged);
    REQUIRE(!iters.empty());
    for (std::size_t i = 1; i < iters.size(); ++i) CHECK(iters[i] == iters[i - 1] + 1);
    CHECK(residuals.back() <= 1e-10);
}

TEST_CASE("dense solve rejects oversized and indefinite systems") {
    using testutil::thrown_code;
    gup::Rng rng(45);

    Instance big = make_instance(rng, ScalePair(65, 65, 8, 8), 0.5);
    CHECK(thrown_code([&] { gup::solve_dense(big.spec()); }) == gup::Errc::invalid_argument);

    // a negative edge weight breaks positive semidefiniteness of the smoothness term
    Instance inst = make_instance(rng, ScalePair(2, 2, 2, 2), 50.0);
    auto edges = gup::grid_edges(2, 2);
    for (gup::Edge& e : edges) e.weight = -5.0;
    inst.lap = gup::assemble_laplacian(2, 2, edges);
    CHECK(thrown_code([&] { gup::solve_dense(inst.spec()); }) == gup::Errc::not_spd);
}

TEST_CASE("spec construction validates shapes and lambda") {
    using testutil::thrown_code;
    gup::Rng rng(46);
    Instance inst = make_instance(rng, ScalePair(4, 4, 2, 2), 0.5);

    CHECK(thrown_code([&] {
              SystemSpec bad(inst.D, inst.lap, -0.5, inst.y, inst.shape);
          }) == gup::Errc::invalid_argument);
    CHECK(thrown_code([&] {
              SystemSpec bad(inst.D, inst.lap, 0.0, inst.y, inst.shape);  // non-identity scale
          }) == gup::Errc::invalid_argument);
    CHECK(thrown_code([&] {
              std::vector<double> y_short(3, 0.0);
              SystemSpec bad(inst.D, inst.lap, 0.5, y_short, inst.shape);
          }) == gup::Errc::dimension_mismatch);
}
