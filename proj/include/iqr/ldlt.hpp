#pragma once

// Sparse LDL^T (square-root-free Cholesky) for symmetric positive definite
// matrices.  Up-looking factorization over the elimination tree; the
// fill-reducing permutation is reverse Cuthill-McKee computed from the
// sparsity pattern alone, so it is a pure function of the pattern and two
// factorizations of equal patterns order identically.  All pivots D_kk must
// come out strictly positive -- that is the returned certificate that the
// matrix was in fact positive definite.

#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "sparse.hpp"

namespace iqr {

enum class Ordering {
    Rcm,     ///< reverse Cuthill-McKee (default)
    Natural, ///< identity permutation
};

namespace detail {

/// Full (both-triangle) adjacency of the pattern, diagonal excluded,
/// neighbor lists sorted by index.
struct Adjacency {
    std::vector<std::size_t> ptr, idx;
};

inline Adjacency pattern_adjacency(const SymSparse& m) {
    Adjacency a;
    a.ptr.assign(m.n + 1, 0);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const std::size_t j = m.col_idx[p];
            if (j != i) ++a.ptr[i + 1], ++a.ptr[j + 1];
        }
    for (std::size_t i = 0; i < m.n; ++i) a.ptr[i + 1] += a.ptr[i];
    a.idx.resize(a.ptr[m.n]);
    std::vector<std::size_t> next(a.ptr.begin(), a.ptr.end() - 1);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const std::size_t j = m.col_idx[p];
            if (j != i) {
                a.idx[next[i]++] = j;
                a.idx[next[j]++] = i;
            }
        }
    // rows were appended in mixed order; sort (also dedups are harmless)
    for (std::size_t i = 0; i < m.n; ++i)
        std::sort(a.idx.begin() + static_cast<std::ptrdiff_t>(a.ptr[i]),
                  a.idx.begin() + static_cast<std::ptrdiff_t>(a.ptr[i + 1]));
    return a;
}

} // namespace detail

/// Reverse Cuthill-McKee ordering; returns perm with perm[new] = old.
/// Ties are always broken toward the smaller node index.
inline std::vector<std::size_t> rcm_ordering(const SymSparse& m) {
    const std::size_t n = m.n;
    const auto adj = detail::pattern_adjacency(m);
    auto degree = [&](std::size_t v) { return adj.ptr[v + 1] - adj.ptr[v]; };

    std::vector<char> visited(n, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::size_t> level(n), queue(n), nbrs;

    // BFS returning eccentricity and the last level's min-degree node
    auto bfs_far = [&](std::size_t root, std::size_t& far) {
        std::vector<char> seen(n, 0);
        std::size_t head = 0, tail = 0, ecc = 0;
        queue[tail++] = root;
        seen[root] = 1;
        level[root] = 0;
        far = root;
        std::size_t best_deg = degree(root);
        while (head < tail) {
            const std::size_t v = queue[head++];
            if (level[v] > ecc) {
                ecc = level[v];
                far = v;
                best_deg = degree(v);
            } else if (level[v] == ecc && degree(v) < best_deg) {
                far = v;
                best_deg = degree(v);
            }
            for (std::size_t p = adj.ptr[v]; p < adj.ptr[v + 1]; ++p) {
                const std::size_t w = adj.idx[p];
                if (!seen[w] && !visited[w]) {
                    seen[w] = 1;
                    level[w] = level[v] + 1;
                    queue[tail++] = w;
                }
            }
        }
        return ecc;
    };

    for (std::size_t scan = 0; scan < n; ++scan) {
        if (visited[scan]) continue;
        // component seed: min degree in the component containing `scan`
        std::size_t seed = scan;
        // pseudo-peripheral refinement
        std::size_t far = seed;
        std::size_t ecc = bfs_far(seed, far);
        for (int round = 0; round < 8; ++round) {
            std::size_t far2;
            const std::size_t ecc2 = bfs_far(far, far2);
            if (ecc2 <= ecc) break;
            ecc = ecc2;
            seed = far;
            far = far2;
        }
        seed = far;

        // Cuthill-McKee sweep from `seed`, neighbors by (degree, index)
        std::size_t head = order.size();
        order.push_back(seed);
        visited[seed] = 1;
        while (head < order.size()) {
            const std::size_t v = order[head++];
            nbrs.clear();
            for (std::size_t p = adj.ptr[v]; p < adj.ptr[v + 1]; ++p) {
                const std::size_t w = adj.idx[p];
                if (!visited[w]) {
                    visited[w] = 1;
                    nbrs.push_back(w);
                }
            }
            std::sort(nbrs.begin(), nbrs.end(), [&](std::size_t a, std::size_t b) {
                const std::size_t da = degree(a), db = degree(b);
                return da != db ? da < db : a < b;
            });
            order.insert(order.end(), nbrs.begin(), nbrs.end());
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

/// Immutable L D L^T factorization.  solve() is const and allocates its own
/// workspace, so concurrent solves on one factor are safe.
class LdltFactor {
  public:
    LdltFactor(const SymSparse& m, Ordering ord) : n_(m.n) {
        perm_ = ord == Ordering::Rcm ? rcm_ordering(m) : identity(n_);
        iperm_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) iperm_[perm_[k]] = k;
        factorize(m);
    }

    std::size_t size() const { return n_; }
    const std::vector<double>& pivots() const { return d_; }
    const std::vector<std::size_t>& permutation() const { return perm_; }

    /// x = M^{-1} rhs.
    std::vector<double> solve(std::span<const double> rhs) const {
        if (rhs.size() != n_) throw DimensionMismatch("solve: rhs size mismatch");
        std::vector<double> w(n_);
        for (std::size_t k = 0; k < n_; ++k) w[k] = rhs[perm_[k]];
        for (std::size_t j = 0; j < n_; ++j) { // L w' = w
            const double wj = w[j];
            for (std::size_t p = lp_[j]; p < lp_[j + 1]; ++p) w[li_[p]] -= lx_[p] * wj;
        }
        for (std::size_t k = 0; k < n_; ++k) w[k] /= d_[k];
        for (std::size_t j = n_; j-- > 0;) { // L^T w'' = w'
            double wj = w[j];
            for (std::size_t p = lp_[j]; p < lp_[j + 1]; ++p) wj -= lx_[p] * w[li_[p]];
            w[j] = wj;
        }
        std::vector<double> x(n_);
        for (std::size_t k = 0; k < n_; ++k) x[perm_[k]] = w[k];
        return x;
    }

  private:
    static std::vector<std::size_t> identity(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = k;
        return p;
    }

    void factorize(const SymSparse& m) {
        // permuted upper triangle, CSC by column (row indices unsorted is fine)
        std::vector<std::size_t> ap(n_ + 1, 0), ai(m.nnz());
        std::vector<double> ax(m.nnz());
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
                const std::size_t a = iperm_[i], b = iperm_[m.col_idx[p]];
                ++ap[(a > b ? a : b) + 1];
            }
        for (std::size_t k = 0; k < n_; ++k) ap[k + 1] += ap[k];
        {
            std::vector<std::size_t> next(ap.begin(), ap.end() - 1);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
                    std::size_t a = iperm_[i], b = iperm_[m.col_idx[p]];
                    if (a > b) std::swap(a, b);
                    ai[next[b]] = a;
                    ax[next[b]] = m.values[p];
                    ++next[b];
                }
        }

        // symbolic: elimination tree and per-column counts of L
        std::vector<std::size_t> parent(n_, NONE), flag(n_, NONE), lnz(n_, 0);
        for (std::size_t k = 0; k < n_; ++k) {
            flag[k] = k;
            for (std::size_t p = ap[k]; p < ap[k + 1]; ++p) {
                std::size_t i = ai[p];
                while (i < k && flag[i] != k) {
                    if (parent[i] == NONE) parent[i] = k;
                    ++lnz[i];
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        lp_.assign(n_ + 1, 0);
        for (std::size_t k = 0; k < n_; ++k) lp_[k + 1] = lp_[k] + lnz[k];
        li_.resize(lp_[n_]);
        lx_.resize(lp_[n_]);
        d_.assign(n_, 0.0);

        // numeric: up-looking, one row of L per step
        std::vector<std::size_t> fill(lp_.begin(), lp_.end() - 1); // next slot per column
        std::vector<std::size_t> pattern(n_), stack(n_);
        std::vector<double> y(n_, 0.0);
        std::fill(flag.begin(), flag.end(), NONE);
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t top = n_;
            flag[k] = k;
            for (std::size_t p = ap[k]; p < ap[k + 1]; ++p) {
                std::size_t i = ai[p];
                y[i] += ax[p];
                std::size_t len = 0;
                while (i < k && flag[i] != k) {
                    pattern[len++] = i;
                    flag[i] = k;
                    i = parent[i];
                }
                while (len > 0) stack[--top] = pattern[--len];
            }
            double dk = y[k];
            y[k] = 0.0;
            for (std::size_t s = top; s < n_; ++s) {
                const std::size_t i = stack[s];
                const double yi = y[i];
                y[i] = 0.0;
                const double lki = yi / d_[i];
                for (std::size_t p = lp_[i]; p < fill[i]; ++p) y[li_[p]] -= lx_[p] * yi;
                li_[fill[i]] = k;
                lx_[fill[i]] = lki;
                ++fill[i];
                dk -= lki * yi;
            }
            if (!(dk > 0.0)) throw NotPositiveDefinite(perm_[k]);
            d_[k] = dk;
        }
    }

    static constexpr std::size_t NONE = static_cast<std::size_t>(-1);

    std::size_t n_;
    std::vector<std::size_t> perm_, iperm_; // perm_[new] = old
    std::vector<std::size_t> lp_, li_;      // L in CSC, unit diagonal implicit
    std::vector<double> lx_;
    std::vector<double> d_;
};

/// Factor a symmetric positive definite matrix; throws NotPositiveDefinite
/// (with the offending original index) if any pivot fails to be positive.
inline LdltFactor factor_spd(const SymSparse& m, Ordering ord = Ordering::Rcm) {
    return LdltFactor(m, ord);
}

} // namespace iqr
