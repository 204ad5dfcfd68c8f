#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ccfqh/sparse.hpp"

// Lowest-k eigenpairs of a SparseHermitian: Lanczos with full
// reorthogonalization and sequential deflation (each converged vector is
// locked and projected out of later runs, which resolves degenerate
// multiplets), plus a dense LAPACK-style fallback used as the test oracle.

namespace ccfqh {

struct DimensionTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Spectrum {
    std::vector<double> eigenvalues;            // ascending
    std::vector<std::vector<cplx>> vectors;     // orthonormal
    std::vector<double> residuals;              // ||Hv - lambda v||
    std::vector<std::vector<int>> clusters;     // near-degenerate index groups
    bool converged = true;
    std::uint64_t seed = 0;

    int k() const { return static_cast<int>(eigenvalues.size()); }

    // Clusters of consecutive eigenvalues closer than tol.
    void rebuild_clusters(double tol) {
        clusters.clear();
        for (int i = 0; i < k(); ++i) {
            if (!clusters.empty() && eigenvalues[i] - eigenvalues[clusters.back().back()] < tol)
                clusters.back().push_back(i);
            else
                clusters.push_back({i});
        }
    }
};

struct EigOptions {
    double tol = 1e-10;
    int max_basis = 320;       // Krylov vectors per restart cycle
    int max_restarts = 60;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    double cluster_tol = 0.0;  // 0: derive from spectral scale
};

namespace detail {

inline void axpy(std::vector<cplx>& y, cplx a, const std::vector<cplx>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}
inline cplx dotc(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s(0, 0);
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}
inline double nrm2(const std::vector<cplx>& a) {
    double s = 0;
    for (const auto& v : a) s += std::norm(v);
    return std::sqrt(s);
}
inline void scal(std::vector<cplx>& a, double f) {
    for (auto& v : a) v *= f;
}

inline void orthogonalize_against(std::vector<cplx>& v, const std::vector<std::vector<cplx>>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) axpy(v, -dotc(b, v), b);
}

inline std::vector<cplx> random_start(std::int64_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> v(dim);
    for (auto& x : v) x = cplx(gauss(rng), gauss(rng));
    return v;
}

}  // namespace detail

inline Spectrum dense_all_eigenpairs(const SparseHermitian& H, std::int64_t cap = 4096) {
    if (H.dim > cap)
        throw DimensionTooLarge("dense path limited to dimension " + std::to_string(cap));
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(H.dim, H.dim);
    for (std::int64_t r = 0; r < H.dim; ++r)
        for (std::int64_t k = H.row_ptr[r]; k < H.row_ptr[r + 1]; ++k) M(r, H.col[k]) = H.val[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");

    Spectrum sp;
    sp.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + H.dim);
    sp.vectors.resize(H.dim);
    sp.residuals.resize(H.dim);
    double scale = 0;
    for (double e : sp.eigenvalues) scale = std::max(scale, std::abs(e));
    for (std::int64_t i = 0; i < H.dim; ++i) {
        sp.vectors[i].assign(es.eigenvectors().col(i).data(), es.eigenvectors().col(i).data() + H.dim);
        auto hv = H.apply(sp.vectors[i]);
        detail::axpy(hv, -sp.eigenvalues[i], sp.vectors[i]);
        sp.residuals[i] = detail::nrm2(hv);
    }
    sp.rebuild_clusters(1e-8 * std::max(1.0, scale));
    return sp;
}

inline Spectrum lowest_eigenpairs(const SparseHermitian& H, int k, double tol = 1e-10,
                                  const EigOptions& opt = {}) {
    if (k < 1 || k > H.dim) throw std::invalid_argument("lowest_eigenpairs: need 1 <= k <= dim");
    const std::int64_t n = H.dim;

    Spectrum sp;
    sp.seed = opt.seed;
    std::vector<std::vector<cplx>>& locked = sp.vectors;

    for (int target = 0; target < k; ++target) {
        std::vector<cplx> start = detail::random_start(n, opt.seed + static_cast<std::uint64_t>(target));
        bool ok = false;
        double theta = 0;
        std::vector<cplx> ritz;

        for (int restart = 0; restart < opt.max_restarts && !ok; ++restart) {
            detail::orthogonalize_against(start, locked);
            double nn = detail::nrm2(start);
            if (nn < 1e-12) {  // start vector swallowed by locked space; redraw
                start = detail::random_start(n, opt.seed + 7919 * (restart + 1) + target);
                detail::orthogonalize_against(start, locked);
                nn = detail::nrm2(start);
            }
            detail::scal(start, 1.0 / nn);

            std::vector<std::vector<cplx>> V{start};
            std::vector<double> alpha, beta;
            const int m_max = std::min<std::int64_t>(opt.max_basis, n - static_cast<std::int64_t>(locked.size()));
            bool exhausted = false;

            for (int j = 0; j < m_max; ++j) {
                std::vector<cplx> w = H.apply(V[j]);
                const double a = detail::dotc(V[j], w).real();
                alpha.push_back(a);
                detail::axpy(w, -a, V[j]);
                if (j > 0) detail::axpy(w, -beta[j - 1], V[j - 1]);
                detail::orthogonalize_against(w, locked);
                detail::orthogonalize_against(w, V);
                const double b = detail::nrm2(w);
                if (b < 1e-13 * std::max(1.0, std::abs(a))) {
                    exhausted = true;
                    break;
                }
                if (j + 1 < m_max) {
                    beta.push_back(b);
                    detail::scal(w, 1.0 / b);
                    V.push_back(std::move(w));
                }
            }

            const int m = static_cast<int>(alpha.size());
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            theta = es.eigenvalues()(0);
            ritz.assign(n, cplx(0, 0));
            for (int i = 0; i < static_cast<int>(V.size()); ++i)
                detail::axpy(ritz, es.eigenvectors()(i, 0), V[i]);

            detail::orthogonalize_against(ritz, locked);
            detail::scal(ritz, 1.0 / detail::nrm2(ritz));
            auto hv = H.apply(ritz);
            theta = detail::dotc(ritz, hv).real();
            detail::axpy(hv, -theta, ritz);
            const double res = detail::nrm2(hv);
            if (res < tol * std::max(1.0, std::abs(theta)) || exhausted) {
                ok = true;
                sp.residuals.push_back(res);
            } else {
                start = ritz;  // restart from the best Ritz vector
            }
        }

        if (!ok) {
            auto hv = H.apply(ritz);
            detail::axpy(hv, -theta, ritz);
            sp.residuals.push_back(detail::nrm2(hv));
            sp.converged = false;
        }
        sp.eigenvalues.push_back(theta);
        locked.push_back(std::move(ritz));
    }

    // eigenvalues come out ascending because each deflated run minimizes over
    // the orthogonal complement, but sort defensively for exact ties
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sp.eigenvalues[a] < sp.eigenvalues[b]; });
    Spectrum out;
    out.converged = sp.converged;
    out.seed = sp.seed;
    for (int i : order) {
        out.eigenvalues.push_back(sp.eigenvalues[i]);
        out.vectors.push_back(std::move(sp.vectors[i]));
        out.residuals.push_back(sp.residuals[i]);
    }
    double scale = 1.0;
    for (double e : out.eigenvalues) scale = std::max(scale, std::abs(e));
    out.rebuild_clusters(opt.cluster_tol > 0 ? opt.cluster_tol : 1e-8 * scale);
    return out;
}

}  // namespace ccfqh
