#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ccfqh/hilbert.hpp"

namespace ccfqh {

// Worker count for row-parallel loops: CCFQH_THREADS overrides hardware
// concurrency. Construction and matvec partition rows into contiguous
// blocks with disjoint writes, so results are deterministic.
inline int thread_count() {
    static const int n = [] {
        if (const char* env = std::getenv("CCFQH_THREADS")) {
            const int v = std::atoi(env);
            if (v >= 1) return v;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }();
    return n;
}

namespace detail {

template <class Fn>
void parallel_rows(std::int64_t rows, const Fn& fn) {
    const int T = std::min<std::int64_t>(thread_count(), std::max<std::int64_t>(1, rows / 256));
    if (T <= 1) {
        fn(0, rows);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (int t = 0; t < T; ++t) {
        const std::int64_t lo = rows * t / T, hi = rows * (t + 1) / T;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Compressed-sparse-row complex Hermitian operator. Both triangles are
// stored; builders emit each directed term, so Hermiticity is by
// construction and can be audited with hermiticity_defect().
struct SparseHermitian {
    std::int64_t dim = 0;
    std::vector<std::int64_t> row_ptr;  // dim+1
    std::vector<std::int32_t> col;
    std::vector<cplx> val;

    std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }

    // rowfn(row, emit) pushes (col, value) pairs for one row; duplicates are
    // accumulated.
    template <class RowFn>
    static SparseHermitian build(std::int64_t dim, const RowFn& rowfn) {
        SparseHermitian m;
        m.dim = dim;
        std::vector<std::vector<std::pair<std::int32_t, cplx>>> rows(dim);
        detail::parallel_rows(dim, [&](std::int64_t lo, std::int64_t hi) {
            std::vector<std::pair<std::int32_t, cplx>> buf;
            for (std::int64_t r = lo; r < hi; ++r) {
                buf.clear();
                rowfn(r, [&buf](std::int64_t c, cplx v) {
                    buf.emplace_back(static_cast<std::int32_t>(c), v);
                });
                std::sort(buf.begin(), buf.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                auto& out = rows[r];
                for (const auto& [c, v] : buf) {
                    if (!out.empty() && out.back().first == c)
                        out.back().second += v;
                    else
                        out.emplace_back(c, v);
                }
            }
        });
        m.row_ptr.assign(dim + 1, 0);
        for (std::int64_t r = 0; r < dim; ++r) m.row_ptr[r + 1] = m.row_ptr[r] + static_cast<std::int64_t>(rows[r].size());
        m.col.resize(m.row_ptr[dim]);
        m.val.resize(m.row_ptr[dim]);
        for (std::int64_t r = 0; r < dim; ++r) {
            std::int64_t k = m.row_ptr[r];
            for (const auto& [c, v] : rows[r]) {
                m.col[k] = c;
                m.val[k] = v;
                ++k;
            }
        }
        return m;
    }

    void matvec(const cplx* x, cplx* y) const {
        detail::parallel_rows(dim, [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t r = lo; r < hi; ++r) {
                cplx acc(0, 0);
                for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
                y[r] = acc;
            }
        });
    }

    std::vector<cplx> apply(const std::vector<cplx>& x) const {
        if (static_cast<std::int64_t>(x.size()) != dim) throw std::invalid_argument("matvec size mismatch");
        std::vector<cplx> y(x.size());
        matvec(x.data(), y.data());
        return y;
    }

    cplx entry(std::int64_t r, std::int64_t c) const {
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (col[k] == c) return val[k];
        return cplx(0, 0);
    }

    // max |A_ij - conj(A_ji)| over stored entries
    double hermiticity_defect() const {
        double worst = 0;
        for (std::int64_t r = 0; r < dim; ++r)
            for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                worst = std::max(worst, std::abs(val[k] - std::conj(entry(col[k], r))));
        return worst;
    }

    // Coordinate-format text export (Matrix Market, complex hermitian,
    // lower triangle, 1-based indices).
    void write_matrix_market(std::ostream& os) const {
        os << "%%MatrixMarket matrix coordinate complex hermitian\n";
        std::int64_t count = 0;
        for (std::int64_t r = 0; r < dim; ++r)
            for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                if (col[k] <= r) ++count;
        os << dim << " " << dim << " " << count << "\n";
        os.precision(17);
        for (std::int64_t r = 0; r < dim; ++r)
            for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                if (col[k] <= r)
                    os << (r + 1) << " " << (col[k] + 1) << " " << val[k].real() << " " << val[k].imag() << "\n";
    }
};

}  // namespace ccfqh
