#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gup/error.hpp"
#include "gup/graph.hpp"
#include "gup/resample.hpp"
#include "gup/sparse.hpp"

namespace gup {

// One reconstruction problem: minimize ||D x - y||^2 + lambda x' L x.
// Non-owning view; all referenced objects must outlive the spec.
struct SystemSpec {
    const SparseOperator& D;
    const Laplacian& lap;
    double lambda;
    const std::vector<double>& y;
    ScalePair shape;

    SystemSpec(const SparseOperator& D_, const Laplacian& lap_, double lambda_,
               const std::vector<double>& y_, ScalePair shape_)
        : D(D_), lap(lap_), lambda(lambda_), y(y_), shape(shape_) {
        require(D_.cols() == lap_.n, Errc::dimension_mismatch, "D.cols != lap.n");
        require(static_cast<int>(y_.size()) == D_.rows(), Errc::dimension_mismatch,
                "y length != D.rows");
        require(shape_.hi_pixels() == lap_.n && shape_.lo_pixels() == D_.rows(),
                Errc::dimension_mismatch, "shape inconsistent with operators");
        // lambda = 0 leaves D'D alone, which is singular unless scale is 1
        require(lambda_ > 0.0 || (lambda_ == 0.0 && shape_.hi_pixels() == shape_.lo_pixels()),
                Errc::invalid_argument, "lambda must be positive (zero only at identity scale)");
    }
};

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    double objective = 0.0;
    bool converged = false;
};

// (D'D + lambda L) v without materializing the system matrix.
inline std::vector<double> system_apply(const SystemSpec& spec, const std::vector<double>& v) {
    require(static_cast<int>(v.size()) == spec.lap.n, Errc::dimension_mismatch,
            "vector length != system size");
    std::vector<double> out = spec.D.apply_transpose(spec.D.apply(v));
    const std::vector<double> lv = spec.lap.L.apply(v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += spec.lambda * lv[i];
    return out;
}

inline double objective(const SystemSpec& spec, const std::vector<double>& x) {
    require(static_cast<int>(x.size()) == spec.lap.n, Errc::dimension_mismatch,
            "vector length != system size");
    const std::vector<double> dx = spec.D.apply(x);
    double data = 0.0;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        const double r = dx[i] - spec.y[i];
        data += r * r;
    }
    return data + spec.lambda * laplacian_quadratic(spec.lap, x);
}

using IterationCallback = std::function<void(int iteration, double relative_residual)>;

namespace detail {

inline std::vector<double> jacobi_diagonal(const SystemSpec& spec) {
    std::vector<double> diag(static_cast<std::size_t>(spec.lap.n), 0.0);
    spec.D.for_each([&](int, int c, double v) { diag[c] += v * v; });
    for (int i = 0; i < spec.lap.n; ++i) {
        diag[i] += spec.lambda * spec.lap.degree[i];
        if (diag[i] <= 0.0) diag[i] = 1.0;
    }
    return diag;
}

inline Image vector_as_image(const std::vector<double>& v, int h, int w) {
    Image img(h, w);
    img.data = v;
    return img;
}

struct CgOutcome {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// Jacobi-preconditioned CG on (D'D + lambda L) x = b. The reported residual
// is recomputed from scratch, never taken from the recurrence.
inline CgOutcome cg_core(const SystemSpec& spec, const std::vector<double>& b,
                         std::vector<double> x, double tol, int max_iter,
                         const IterationCallback& on_iteration) {
    require(tol > 0.0, Errc::invalid_argument, "tolerance must be positive");
    const int n = spec.lap.n;
    if (max_iter <= 0) max_iter = 10 * n;

    const double bnorm = norm2(b);
    CgOutcome out;
    if (bnorm == 0.0) {
        out.x.assign(static_cast<std::size_t>(n), 0.0);
        out.converged = true;
        return out;
    }

    const std::vector<double> diag = jacobi_diagonal(spec);
    auto precondition = [&](const std::vector<double>& r) {
        std::vector<double> z(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
        return z;
    };

    std::vector<double> r = b;
    {
        const std::vector<double> ax = system_apply(spec, x);
        for (int i = 0; i < n; ++i) r[i] -= ax[i];
    }
    std::vector<double> z = precondition(r);
    std::vector<double> p = z;
    double rz = dot(r, z);

    int iter = 0;
    bool converged = norm2(r) / bnorm <= tol;
    while (!converged && iter < max_iter) {
        ++iter;
        const std::vector<double> ap = system_apply(spec, p);
        const double pap = dot(p, ap);
        if (!std::isfinite(pap))
            fail(Errc::solver_divergence, "non-finite curvature at iteration " + std::to_string(iter));
        if (pap <= 0.0)
            fail(Errc::solver_breakdown, "non-positive curvature at iteration " + std::to_string(iter));
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if (!all_finite(r))
            fail(Errc::solver_divergence, "non-finite residual at iteration " + std::to_string(iter));

        const double rel = norm2(r) / bnorm;
        if (on_iteration) on_iteration(iter, rel);
        if (rel <= tol) {
            // recurrence says done; verify with the true residual
            std::vector<double> rt = b;
            const std::vector<double> ax = system_apply(spec, x);
            for (int i = 0; i < n; ++i) rt[i] -= ax[i];
            if (norm2(rt) / bnorm <= tol) {
                converged = true;
                break;
            }
            r = std::move(rt);
            z = precondition(r);
            p = z;
            rz = dot(r, z);
            continue;
        }

        z = precondition(r);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    out.x = std::move(x);
    out.iterations = iter;
    {
        std::vector<double> rt = b;
        const std::vector<double> ax = system_apply(spec, out.x);
        for (int i = 0; i < n; ++i) rt[i] -= ax[i];
        out.relative_residual = norm2(rt) / bnorm;
    }
    out.converged = out.relative_residual <= tol;
    return out;
}

} // namespace detail

// Forward solve (D'D + lambda L) x = D'y, warm-started from the bicubic
// upsample of y. The warm start only affects iteration count; the system is
// SPD with a unique solution.
inline SolveResult solve_cg(const SystemSpec& spec, double tol = 1e-8, int max_iter = 0,
                            const IterationCallback& on_iteration = {}) {
    const std::vector<double> b = spec.D.apply_transpose(spec.y);
    const Image warm = bicubic_upsample(
        detail::vector_as_image(spec.y, spec.shape.lo_height, spec.shape.lo_width),
        spec.shape.hi_height, spec.shape.hi_width);

    detail::CgOutcome cg = detail::cg_core(spec, b, warm.data, tol, max_iter, on_iteration);
    SolveResult res;
    res.x = std::move(cg.x);
    res.iterations = cg.iterations;
    res.relative_residual = cg.relative_residual;
    res.converged = cg.converged;
    res.objective = objective(spec, res.x);
    return res;
}

// Dense assembly + Cholesky factorization. Oracle-grade direct solve,
// guarded to small systems.
inline SolveResult solve_dense(const SystemSpec& spec) {
    const int n = spec.lap.n;
    require(n <= 4096, Errc::invalid_argument, "dense solve guarded to n <= 4096");

    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (int l = 0; l < spec.D.rows(); ++l) {
        spec.D.for_each_in_row(l, [&](int c1, double v1) {
            spec.D.for_each_in_row(l, [&](int c2, double v2) {
                a[static_cast<std::size_t>(c1) * n + c2] += v1 * v2;
            });
        });
    }
    spec.lap.L.for_each([&](int r, int c, double v) {
        a[static_cast<std::size_t>(r) * n + c] += spec.lambda * v;
    });

    // in-place lower Cholesky
    for (int j = 0; j < n; ++j) {
        double d = a[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            const double ljk = a[static_cast<std::size_t>(j) * n + k];
            d -= ljk * ljk;
        }
        if (!(d > 0.0)) fail(Errc::not_spd, "system matrix is not positive definite");
        const double ljj = std::sqrt(d);
        a[static_cast<std::size_t>(j) * n + j] = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
            a[static_cast<std::size_t>(i) * n + j] = s / ljj;
        }
    }

    const std::vector<double> b = spec.D.apply_transpose(spec.y);
    std::vector<double> x = b;
    for (int i = 0; i < n; ++i) {  // L w = b
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * x[k];
        x[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {  // L' x = w
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= a[static_cast<std::size_t>(k) * n + i] * x[k];
        x[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }

    SolveResult res;
    res.x = std::move(x);
    res.iterations = 0;
    const double bnorm = norm2(b);
    if (bnorm > 0.0) {
        std::vector<double> rt = b;
        const std::vector<double> ax = system_apply(spec, res.x);
        for (int i = 0; i < n; ++i) rt[i] -= ax[i];
        res.relative_residual = norm2(rt) / bnorm;
    }
    res.converged = true;
    res.objective = objective(spec, res.x);
    return res;
}

} // namespace gup
