#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"

namespace heightgrowth {

/// Dense integer matrix with arbitrary-precision entries, row-major.
/// Columns are read as lattice generators where a lattice is meant.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
        rows_ = static_cast<int>(init.size());
        cols_ = rows_ ? static_cast<int>(init.begin()->size()) : 0;
        for (const auto& row : init) {
            if (static_cast<int>(row.size()) != cols_) throw DomainError("ragged matrix literal");
            for (long long v : row) a_.emplace_back(v);
        }
    }

    static IntMatrix identity(int n) {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    template <class Range>
    static IntMatrix from_rows(int rows, int cols, const Range& entries) {
        IntMatrix m(rows, cols);
        std::size_t k = 0;
        for (const auto& v : entries) m.a_.at(k++) = BigInt(v);
        if (k != m.a_.size()) throw DomainError("entry count does not match shape");
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    BigInt& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const BigInt& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<BigInt>& entries() const { return a_; }

    bool operator==(const IntMatrix&) const = default;

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        if (x.cols_ != y.rows_) throw DomainError("matrix product shape mismatch");
        IntMatrix r(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                if (x(i, k) == 0) continue;
                for (int j = 0; j < y.cols_; ++j) r(i, j) += x(i, k) * y(k, j);
            }
        return r;
    }

    IntMatrix scaled(const BigInt& s) const {
        IntMatrix r = *this;
        for (auto& v : r.a_) v *= s;
        return r;
    }

    /// gcd of all entries (0 for the zero matrix).
    BigInt content() const {
        BigInt g = 0;
        for (const auto& v : a_) g = boost::multiprecision::gcd(g, v);
        return boost::multiprecision::abs(g);
    }

    void swap_cols(int j, int k) {
        for (int i = 0; i < rows_; ++i) std::swap((*this)(i, j), (*this)(i, k));
    }
    void swap_rows(int i, int k) {
        for (int j = 0; j < cols_; ++j) std::swap((*this)(i, j), (*this)(k, j));
    }

    friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
        os << '[';
        for (int i = 0; i < m.rows_; ++i) {
            os << (i ? ",[" : "[");
            for (int j = 0; j < m.cols_; ++j) os << (j ? "," : "") << m(i, j);
            os << ']';
        }
        return os << ']';
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<BigInt> a_;
};

namespace detail {

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// s*x + t*y = g = gcd(x, y) >= 0.
inline void ext_gcd(const BigInt& x, const BigInt& y, BigInt& g, BigInt& s, BigInt& t) {
    BigInt r0 = x, r1 = y, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
        const BigInt q = r0 / r1;
        BigInt tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = s0 - q * s1;
        s0 = s1;
        s1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    if (r0 < 0) {
        r0 = -r0;
        s0 = -s0;
        t0 = -t0;
    }
    g = r0;
    s = s0;
    t = t0;
}

}  // namespace detail

/// Determinant by fraction-free Bareiss elimination.
inline BigInt determinant(IntMatrix m) {
    if (!m.square()) throw DomainError("determinant of non-square matrix");
    const int n = m.rows();
    if (n == 0) return 1;
    int sign = 1;
    BigInt prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m(k, k) == 0) {
            int r = k + 1;
            while (r < n && m(r, k) == 0) ++r;
            if (r == n) return 0;
            m.swap_rows(k, r);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

/// Adjugate, so that A * adj(A) = det(A) * I.
inline IntMatrix adjugate(const IntMatrix& a) {
    const int n = a.rows();
    IntMatrix r(n, n);
    if (n == 1) {
        r(0, 0) = 1;
        return r;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            IntMatrix minor(n - 1, n - 1);
            for (int ii = 0, mi = 0; ii < n; ++ii) {
                if (ii == i) continue;
                for (int jj = 0, mj = 0; jj < n; ++jj) {
                    if (jj == j) continue;
                    minor(mi, mj++) = a(ii, jj);
                }
                ++mi;
            }
            BigInt c = determinant(minor);
            if ((i + j) % 2) c = -c;
            r(j, i) = c;
        }
    return r;
}

/// Column Hermite normal form of the lattice spanned by the columns of `gens`
/// (d rows, >= d columns, full row rank). Result H is d x d upper triangular
/// with H(i,i) > 0 and 0 <= H(i,j) < H(i,i) for j > i.
inline IntMatrix hermite_normal_form(IntMatrix gens) {
    const int d = gens.rows();
    const int n = gens.cols();
    std::vector<int> active(n);
    for (int j = 0; j < n; ++j) active[j] = j;
    IntMatrix h(d, d);
    for (int i = d - 1; i >= 0; --i) {
        int pivot = -1;
        for (int j : active) {
            if (gens(i, j) == 0) continue;
            if (pivot < 0) {
                pivot = j;
                continue;
            }
            BigInt g, s, t;
            detail::ext_gcd(gens(i, pivot), gens(i, j), g, s, t);
            const BigInt xa = gens(i, pivot) / g;
            const BigInt yb = gens(i, j) / g;
            for (int r = 0; r <= i; ++r) {
                const BigInt a = gens(r, pivot);
                const BigInt b = gens(r, j);
                gens(r, pivot) = s * a + t * b;
                gens(r, j) = xa * b - yb * a;
            }
        }
        if (pivot < 0) throw SingularMatrixError();
        const int sgn = gens(i, pivot) < 0 ? -1 : 1;
        for (int r = 0; r <= i; ++r) h(r, i) = sgn * gens(r, pivot);
        active.erase(std::find(active.begin(), active.end(), pivot));
    }
    for (int j = 1; j < d; ++j)
        for (int i = j - 1; i >= 0; --i) {
            const BigInt q = detail::floor_div(h(i, j), h(i, i));
            if (q == 0) continue;
            for (int r = 0; r <= i; ++r) h(r, j) -= q * h(r, i);
        }
    return h;
}

/// Smith normal form diagonal s_1 | s_2 | ... | s_d (all positive) of a
/// nonsingular square matrix.
inline std::vector<BigInt> smith_diagonal(IntMatrix m) {
    if (!m.square()) throw DomainError("Smith normal form of non-square matrix");
    const int n = m.rows();
    std::vector<BigInt> diag;
    for (int t = 0; t < n; ++t) {
        for (;;) {
            int pi = -1, pj = -1;
            for (int i = t; i < n; ++i)
                for (int j = t; j < n; ++j) {
                    if (m(i, j) == 0) continue;
                    if (pi < 0 || boost::multiprecision::abs(m(i, j)) < boost::multiprecision::abs(m(pi, pj))) {
                        pi = i;
                        pj = j;
                    }
                }
            if (pi < 0) throw SingularMatrixError();
            m.swap_rows(t, pi);
            m.swap_cols(t, pj);
            bool clean = true;
            for (int i = t + 1; i < n; ++i) {
                const BigInt q = detail::floor_div(m(i, t), m(t, t));
                if (q != 0)
                    for (int j = t; j < n; ++j) m(i, j) -= q * m(t, j);
                if (m(i, t) != 0) clean = false;
            }
            for (int j = t + 1; j < n; ++j) {
                const BigInt q = detail::floor_div(m(t, j), m(t, t));
                if (q != 0)
                    for (int i = t; i < n; ++i) m(i, j) -= q * m(i, t);
                if (m(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            // Divisibility chain: fold an offending row into row t.
            int bad = -1;
            for (int i = t + 1; i < n && bad < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (m(i, j) % m(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            for (int j = t; j < n; ++j) m(t, j) += m(bad, j);
        }
        diag.push_back(boost::multiprecision::abs(m(t, t)));
    }
    return diag;
}

/// True iff the lattice p^a_exp * A Z^d contains p^b_exp * B Z^d, decided by
/// exact divisibility of adj(A) * B against det(A).
inline bool lattice_contains(const IntMatrix& a, int a_exp, const IntMatrix& b, int b_exp, std::int64_t p) {
    const BigInt det = determinant(a);
    if (det == 0) throw SingularMatrixError();
    IntMatrix q = adjugate(a) * b;
    BigInt modulus = boost::multiprecision::abs(det);
    if (b_exp >= a_exp)
        q = q.scaled(arith::ipow(p, static_cast<unsigned>(b_exp - a_exp)));
    else
        modulus *= arith::ipow(p, static_cast<unsigned>(a_exp - b_exp));
    for (const auto& v : q.entries())
        if (v % modulus != 0) return false;
    return true;
}

}  // namespace heightgrowth
