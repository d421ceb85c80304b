#pragma once

// Symmetric sparse matrices.  Only the upper triangle (including the
// diagonal) is stored, in CSR layout with sorted column indices; symmetry is
// therefore structural and cannot drift.  Assembly goes through TripletList,
// which accepts entries in either triangle and in any order.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"

namespace iqr {

/// Unordered (i, j, v) entries for an N x N symmetric matrix.  An entry may
/// be given in either triangle; duplicates accumulate.
struct TripletList {
    std::size_t n = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    std::vector<double> vals;

    explicit TripletList(std::size_t dim) : n(dim) {}

    void add(std::size_t i, std::size_t j, double v) {
        if (i >= n || j >= n) throw DimensionMismatch("triplet index out of range");
        if (j < i) std::swap(i, j); // store upper
        rows.push_back(i);
        cols.push_back(j);
        vals.push_back(v);
    }
};

/// Upper-triangular CSR storage of a symmetric matrix.
struct SymSparse {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr; // size n+1
    std::vector<std::size_t> col_idx; // sorted within each row, all >= row
    std::vector<double> values;

    std::size_t nnz() const { return values.size(); }
};

/// Compress triplets: sum duplicates, sort columns within rows.
inline SymSparse triplets_to_sym(const TripletList& t) {
    const std::size_t n = t.n;
    const std::size_t m = t.vals.size();
    SymSparse s;
    s.n = n;
    s.row_ptr.assign(n + 1, 0);

    // bucket by row, then sort each row's (col, val) pairs and merge
    std::vector<std::size_t> count(n, 0);
    for (std::size_t k = 0; k < m; ++k) ++count[t.rows[k]];
    std::vector<std::size_t> start(n + 1, 0);
    std::partial_sum(count.begin(), count.end(), start.begin() + 1);
    std::vector<std::size_t> order(m);
    {
        std::vector<std::size_t> next(start.begin(), start.end() - 1);
        for (std::size_t k = 0; k < m; ++k) order[next[t.rows[k]]++] = k;
    }
    std::vector<std::size_t> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = start[i], hi = start[i + 1];
        scratch.assign(order.begin() + lo, order.begin() + hi);
        std::sort(scratch.begin(), scratch.end(), [&](std::size_t a, std::size_t b) {
            return t.cols[a] < t.cols[b];
        });
        for (std::size_t p = 0; p < scratch.size(); ++p) {
            const std::size_t col = t.cols[scratch[p]];
            const double v = t.vals[scratch[p]];
            if (!s.col_idx.empty() && s.row_ptr[i + 1] > s.row_ptr[i] && s.col_idx.back() == col) {
                s.values.back() += v; // duplicate -> accumulate
            } else {
                s.col_idx.push_back(col);
                s.values.push_back(v);
                ++s.row_ptr[i + 1];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
    return s;
}

/// y = M x, expanding the symmetric storage on the fly.
inline std::vector<double> matvec(const SymSparse& m, std::span<const double> x) {
    if (x.size() != m.n) throw DimensionMismatch("matvec: size mismatch");
    std::vector<double> y(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const std::size_t j = m.col_idx[p];
            const double v = m.values[p];
            y[i] += v * x[j];
            if (j != i) y[j] += v * x[i];
        }
    }
    return y;
}

/// x^T M x touching each stored entry once.
inline double quad_form(const SymSparse& m, std::span<const double> x) {
    if (x.size() != m.n) throw DimensionMismatch("quad_form: size mismatch");
    double diag = 0.0, off = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const std::size_t j = m.col_idx[p];
            if (j == i)
                diag += m.values[p] * x[i] * x[i];
            else
                off += m.values[p] * x[i] * x[j];
        }
    }
    return diag + 2.0 * off;
}

/// A + alpha * B on merged patterns.
inline SymSparse add_scaled(const SymSparse& a, double alpha, const SymSparse& b) {
    if (a.n != b.n) throw DimensionMismatch("add_scaled: size mismatch");
    SymSparse c;
    c.n = a.n;
    c.row_ptr.assign(a.n + 1, 0);
    for (std::size_t i = 0; i < a.n; ++i) {
        std::size_t pa = a.row_ptr[i], pb = b.row_ptr[i];
        const std::size_t ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
        while (pa < ea || pb < eb) {
            std::size_t ja = pa < ea ? a.col_idx[pa] : static_cast<std::size_t>(-1);
            std::size_t jb = pb < eb ? b.col_idx[pb] : static_cast<std::size_t>(-1);
            if (ja == jb) {
                c.col_idx.push_back(ja);
                c.values.push_back(a.values[pa] + alpha * b.values[pb]);
                ++pa, ++pb;
            } else if (ja < jb) {
                c.col_idx.push_back(ja);
                c.values.push_back(a.values[pa]);
                ++pa;
            } else {
                c.col_idx.push_back(jb);
                c.values.push_back(alpha * b.values[pb]);
                ++pb;
            }
            ++c.row_ptr[i + 1];
        }
    }
    for (std::size_t i = 0; i < c.n; ++i) c.row_ptr[i + 1] += c.row_ptr[i];
    return c;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace iqr
