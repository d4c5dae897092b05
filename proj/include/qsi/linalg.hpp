#pragma once

#include "qsi/common.hpp"

#include <optional>
#include <vector>

namespace qsi {

/// Dense matrix over the exact rationals.
struct RatMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rat> data;

    RatMatrix() = default;
    RatMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

    Rat& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const Rat& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    bool operator==(const RatMatrix&) const = default;
};

inline RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols != b.rows) fail("shape mismatch", "matrix product shapes");
    RatMatrix r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            if (a.at(i, k) == 0) continue;
            for (int j = 0; j < b.cols; ++j)
                if (b.at(k, j) != 0) r.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    return r;
}

inline RatMatrix transpose(const RatMatrix& a) {
    RatMatrix r(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) r.at(j, i) = a.at(i, j);
    return r;
}

namespace detail {

/// Clears denominators row by row so fraction-free elimination stays in the
/// integers; the scaling does not change row spaces or kernels.
inline void scale_rows_integral(RatMatrix& m) {
    for (int i = 0; i < m.rows; ++i) {
        BigInt l = 1;
        for (int j = 0; j < m.cols; ++j) {
            BigInt d = denominator(m.at(i, j));
            l = boost::multiprecision::lcm(l, d);
        }
        if (l != 1)
            for (int j = 0; j < m.cols; ++j) m.at(i, j) *= Rat(l);
    }
}

/// Fraction-free (Bareiss) forward elimination with canonical pivot order
/// (leftmost nonzero column, topmost row). Returns the pivot columns; `m` ends
/// in row-echelon form with integer entries.
inline std::vector<int> bareiss_forward(RatMatrix& m) {
    scale_rows_integral(m);
    std::vector<int> pivots;
    Rat prev = 1;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int p = -1;
        for (int i = row; i < m.rows; ++i)
            if (m.at(i, col) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(row, j));
        const Rat piv = m.at(row, col);
        for (int i = row + 1; i < m.rows; ++i) {
            const Rat head = m.at(i, col);
            for (int j = col; j < m.cols; ++j)
                m.at(i, j) = (m.at(i, j) * piv - head * m.at(row, j)) / prev;
        }
        prev = piv;
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace detail

inline int rank(RatMatrix m) {
    return static_cast<int>(detail::bareiss_forward(m).size());
}

/// Exact determinant (Bareiss after clearing denominators).
inline Rat det(RatMatrix m) {
    if (m.rows != m.cols) fail("non-square", "determinant of non-square matrix");
    const int n = m.rows;
    if (n == 0) return 1;
    Rat scale = 1;  // product of the row scalings applied below
    for (int i = 0; i < n; ++i) {
        BigInt l = 1;
        for (int j = 0; j < n; ++j) l = boost::multiprecision::lcm(l, denominator(m.at(i, j)));
        if (l != 1) {
            for (int j = 0; j < n; ++j) m.at(i, j) *= Rat(l);
            scale *= Rat(l);
        }
    }
    Rat prev = 1;
    int sign = 1;
    for (int k = 0; k < n; ++k) {
        int p = -1;
        for (int i = k; i < n; ++i)
            if (m.at(i, k) != 0) {
                p = i;
                break;
            }
        if (p < 0) return 0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(m.at(p, j), m.at(k, j));
            sign = -sign;
        }
        const Rat piv = m.at(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Rat head = m.at(i, k);
            for (int j = k; j < n; ++j)
                m.at(i, j) = (m.at(i, j) * piv - head * m.at(k, j)) / prev;
        }
        prev = piv;
    }
    Rat d = m.at(n - 1, n - 1);
    if (sign < 0) d = -d;
    return d / scale;
}

/// Reduced row-echelon form with unit pivots and zero rows dropped; the
/// canonical representative of the row space.
inline RatMatrix rref(RatMatrix m, std::vector<int>* pivot_cols = nullptr) {
    std::vector<int> pivots = detail::bareiss_forward(m);
    const int r = static_cast<int>(pivots.size());
    // normalize pivots and eliminate above
    for (int i = r - 1; i >= 0; --i) {
        const int pc = pivots[i];
        const Rat piv = m.at(i, pc);
        for (int j = pc; j < m.cols; ++j) m.at(i, j) /= piv;
        for (int k = 0; k < i; ++k) {
            const Rat f = m.at(k, pc);
            if (f == 0) continue;
            for (int j = pc; j < m.cols; ++j) m.at(k, j) -= f * m.at(i, j);
        }
    }
    RatMatrix out(r, m.cols);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < m.cols; ++j) out.at(i, j) = m.at(i, j);
    if (pivot_cols) *pivot_cols = std::move(pivots);
    return out;
}

/// Canonical basis of {x : M x = 0}, one vector per free column, derived from
/// the reduced echelon form. Each basis vector has a 1 in its free coordinate.
inline std::vector<std::vector<Rat>> right_nullspace(const RatMatrix& m) {
    std::vector<int> pivots;
    RatMatrix r = rref(m, &pivots);
    std::vector<bool> is_pivot(m.cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<std::vector<Rat>> basis;
    for (int free = 0; free < m.cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rat> v(m.cols);
        v[free] = 1;
        for (int i = 0; i < r.rows; ++i) {
            // pivot column of row i
            v[pivots[i]] = -r.at(i, free);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One solution of M x = b, if any.
inline std::optional<std::vector<Rat>> solve_linear(const RatMatrix& m, const std::vector<Rat>& b) {
    if (static_cast<int>(b.size()) != m.rows) fail("shape mismatch", "solve_linear rhs size");
    RatMatrix aug(m.rows, m.cols + 1);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols) = b[i];
    }
    std::vector<int> pivots;
    RatMatrix r = rref(std::move(aug), &pivots);
    for (int c : pivots)
        if (c == m.cols) return std::nullopt;  // inconsistent system
    std::vector<Rat> x(m.cols);
    for (int i = 0; i < r.rows; ++i) x[pivots[i]] = r.at(i, m.cols);
    return x;
}

inline RatMatrix inverse(const RatMatrix& m) {
    if (m.rows != m.cols) fail("non-square", "inverse of non-square matrix");
    const int n = m.rows;
    RatMatrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = 1;
    }
    std::vector<int> pivots;
    RatMatrix r = rref(std::move(aug), &pivots);
    if (static_cast<int>(pivots.size()) != n || pivots[n - 1] != n - 1)
        fail("singular", "matrix not invertible");
    RatMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv.at(i, j) = r.at(i, n + j);
    return inv;
}

/// Incrementally maintained reduced row space; used for span containment and
/// rank bookkeeping. Rows are kept reduced with unit pivots so membership
/// tests and ranks are canonical.
class RowSpace {
public:
    explicit RowSpace(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    int rank() const { return static_cast<int>(rows_.size()); }

    /// Reduces v against the current rows; returns the residue.
    std::vector<Rat> reduce(std::vector<Rat> v) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const Rat& c = v[pivots_[i]];
            if (c == 0) continue;
            const Rat f = c;
            for (int j = 0; j < dim_; ++j)
                if (rows_[i][j] != 0) v[j] -= f * rows_[i][j];
        }
        return v;
    }

    bool contains(const std::vector<Rat>& v) const {
        std::vector<Rat> r = reduce(v);
        for (const Rat& c : r)
            if (c != 0) return false;
        return true;
    }

    /// Inserts v; returns true when the rank grew.
    bool insert(std::vector<Rat> v) {
        v = reduce(std::move(v));
        int p = -1;
        for (int j = 0; j < dim_; ++j)
            if (v[j] != 0) {
                p = j;
                break;
            }
        if (p < 0) return false;
        const Rat piv = v[p];
        for (int j = 0; j < dim_; ++j) v[j] /= piv;
        // eliminate the new pivot from existing rows, keep rows sorted by pivot
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const Rat f = rows_[i][p];
            if (f == 0) continue;
            for (int j = 0; j < dim_; ++j) rows_[i][j] -= f * v[j];
        }
        std::size_t pos = 0;
        while (pos < pivots_.size() && pivots_[pos] < p) ++pos;
        pivots_.insert(pivots_.begin() + pos, p);
        rows_.insert(rows_.begin() + pos, std::move(v));
        return true;
    }

    const std::vector<std::vector<Rat>>& rows() const { return rows_; }

private:
    int dim_;
    std::vector<std::vector<Rat>> rows_;
    std::vector<int> pivots_;
};

}  // namespace qsi
