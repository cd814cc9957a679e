#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "int_matrix.hpp"

namespace heightgrowth::building {

/// Matrix size d and residue characteristic p of the building of PGL_d(Q_p).
class BuildingParams {
public:
    BuildingParams(int d, std::int64_t p) : d_(d), p_(p) {
        if (d < 2) throw DomainError("building: d must be >= 2");
        if (!arith::is_prime(p)) throw DomainError("building: p must be prime");
    }
    int d() const { return d_; }
    std::int64_t p() const { return p_; }

private:
    int d_;
    std::int64_t p_;
};

/// c(p) = (d-1)p^{d-1} + p^{d-2} + ... + p, the branching factor of the
/// sphere recursion.
inline BigInt branching_c(const BuildingParams& bp) {
    BigInt c = (bp.d() - 1) * arith::ipow(bp.p(), bp.d() - 1);
    for (int j = 1; j <= bp.d() - 2; ++j) c += arith::ipow(bp.p(), j);
    return c;
}

/// D(p) = (d-1)(p^d - 1)/(p - 1), the number of neighbours of a vertex.
inline BigInt neighbours_D(const BuildingParams& bp) {
    return (bp.d() - 1) * ((arith::ipow(bp.p(), bp.d()) - 1) / (bp.p() - 1));
}

/// D(p^k) = D(p) c(p)^{k-1}, D(p^0) = 1.
inline BigInt sphere_size(const BuildingParams& bp, int k) {
    if (k < 0) throw DomainError("sphere_size: k must be >= 0");
    if (k == 0) return 1;
    return neighbours_D(bp) * boost::multiprecision::pow(branching_c(bp), static_cast<unsigned>(k - 1));
}

/// 1 + D(p)(c^k - 1)/(c - 1); equals the running sum of sphere_size.
inline BigInt ball_size(const BuildingParams& bp, int k) {
    if (k < 0) throw DomainError("ball_size: k must be >= 0");
    const BigInt c = branching_c(bp);
    return 1 + neighbours_D(bp) * ((boost::multiprecision::pow(c, static_cast<unsigned>(k)) - 1) / (c - 1));
}

/// Vertices at distance k in the SL_2(Q_p)-orbit of the base vertex of the
/// tree: only even distances are reached.
inline BigInt sl2_sphere_size(std::int64_t p, int k) {
    if (!arith::is_prime(p)) throw DomainError("sl2_sphere_size: p must be prime");
    if (k < 0) throw DomainError("sl2_sphere_size: k must be >= 0");
    if (k == 0) return 1;
    if (k % 2) return 0;
    return (p + 1) * arith::ipow(p, static_cast<unsigned>(k - 1));
}

/// Nondecreasing p-adic valuations of the elementary divisors.
struct ElemDivisorType {
    std::vector<int> exponents;

    int spread() const { return exponents.empty() ? 0 : exponents.back() - exponents.front(); }
    int total() const {
        int s = 0;
        for (int a : exponents) s += a;
        return s;
    }
    bool operator==(const ElemDivisorType&) const = default;
};

inline ElemDivisorType snf_exponents(const IntMatrix& m, std::int64_t p) {
    if (!arith::is_prime(p)) throw DomainError("snf_exponents: p must be prime");
    if (!m.square()) throw DomainError("snf_exponents: matrix must be square");
    ElemDivisorType t;
    for (const auto& s : smith_diagonal(m)) t.exponents.push_back(arith::valuation(s, p));
    std::sort(t.exponents.begin(), t.exponents.end());
    return t;
}

/// Graph distance in the 1-skeleton between M Z_p^d and the base vertex:
/// max minus min of the elementary-divisor valuations.
inline int building_distance(const IntMatrix& m, std::int64_t p) { return snf_exponents(m, p).spread(); }

/// Homothety class of a Z_p-lattice, stored as its canonical representative:
/// the column HNF of the unique primitive lattice L with L in Z^d, L not in
/// pZ^d, det L a power of p. Row-major, upper triangular, diagonal entries
/// powers of p, entry (i,j) for j > i reduced into [0, H(i,i)).
class LatticeClass {
public:
    LatticeClass(int d, std::vector<std::int64_t> hnf) : d_(d), hnf_(std::move(hnf)) {}

    int d() const { return d_; }
    const std::vector<std::int64_t>& hnf() const { return hnf_; }
    std::int64_t at(int i, int j) const { return hnf_[static_cast<std::size_t>(i) * d_ + j]; }

    IntMatrix matrix() const { return IntMatrix::from_rows(d_, d_, hnf_); }

    /// Exponent e with det = p^e.
    int det_exponent(std::int64_t p) const {
        int e = 0;
        for (int i = 0; i < d_; ++i)
            for (std::int64_t v = at(i, i); v > 1; v /= p) ++e;
        return e;
    }

    auto operator<=>(const LatticeClass&) const = default;
    bool operator==(const LatticeClass&) const = default;

    std::string to_string() const {
        std::string s = "[";
        for (int i = 0; i < d_; ++i) {
            s += i ? ",[" : "[";
            for (int j = 0; j < d_; ++j) {
                if (j) s += ',';
                s += std::to_string(at(i, j));
            }
            s += ']';
        }
        return s + ']';
    }

private:
    int d_;
    std::vector<std::int64_t> hnf_;
};

struct LatticeClassHash {
    std::size_t operator()(const LatticeClass& c) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (auto v : c.hnf()) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
        return h;
    }
};

/// Canonical class of the lattice spanned by the columns of `gens`, whose
/// index in Z^d must be a power of p.
inline LatticeClass canonical_class(const IntMatrix& gens, std::int64_t p) {
    IntMatrix h = hermite_normal_form(gens);
    const int d = h.rows();
    BigInt det = 1;
    for (int i = 0; i < d; ++i) det *= h(i, i);
    while (det % p == 0) det /= p;
    if (det != 1) throw DomainError("canonical_class: lattice index is not a power of p");
    // Strip p from the content; a homothety keeps HNF shape and reduction.
    for (;;) {
        bool divisible = true;
        for (const auto& v : h.entries())
            if (v % p != 0) {
                divisible = false;
                break;
            }
        if (!divisible) break;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) h(i, j) /= p;
    }
    std::vector<std::int64_t> flat;
    flat.reserve(h.entries().size());
    for (const auto& v : h.entries()) {
        if (v > BigInt(std::numeric_limits<std::int64_t>::max()))
            throw BudgetError("canonical_class: HNF entry exceeds 64 bits", arith::to_double(v), 9.2e18);
        flat.push_back(v.convert_to<std::int64_t>());
    }
    return LatticeClass(d, std::move(flat));
}

/// Class of the p-local lattice M Z_p^d, realized as M Z^d + p^v Z^d with
/// v = v_p(det M).
inline LatticeClass local_class(const IntMatrix& m, std::int64_t p) {
    const BigInt det = determinant(m);
    if (det == 0) throw SingularMatrixError();
    const int d = m.rows();
    const int v = arith::valuation(det, p);
    IntMatrix gens(d, 2 * d);
    const BigInt pv = arith::ipow(p, static_cast<unsigned>(v));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) gens(i, j) = m(i, j);
        gens(i, d + i) = pv;
    }
    return canonical_class(gens, p);
}

/// Exact adjacency test: [L] ~ [M] iff p L < p^t M < L for some integer t,
/// with strict containments on both sides.
inline bool adjacent(const LatticeClass& l, const LatticeClass& m, std::int64_t p) {
    if (l == m) return false;
    const int d = l.d();
    const int el = l.det_exponent(p);
    const int em = m.det_exponent(p);
    // det(p^t M) = p^{dt + em} must lie strictly between p^el and p^{el+d}.
    const IntMatrix lm = l.matrix();
    const IntMatrix mm = m.matrix();
    for (int t = (el - em) / d - 1; t <= (el - em) / d + 1; ++t) {
        const int e = d * t + em;
        if (e <= el || e >= el + d) continue;
        if (lattice_contains(lm, 0, mm, t, p) && lattice_contains(mm, t, lm, 1, p)) return true;
    }
    return false;
}

struct ClassAtDistance {
    LatticeClass lattice;
    int distance;
};

struct EnumerationLimits {
    double max_classes = 1e7;
};

/// Number of column-HNF matrices with determinant p^e for e <= max_e.
inline double estimate_hnf_count(int d, std::int64_t p, int max_e) {
    // ways[e] after processing rows: row i carries d-1-i free entries mod p^{e_i}.
    std::vector<double> ways(static_cast<std::size_t>(max_e) + 1, 0.0);
    ways[0] = 1.0;
    for (int i = 0; i < d; ++i) {
        const int free_entries = d - 1 - i;
        std::vector<double> next(ways.size(), 0.0);
        for (int e = 0; e <= max_e; ++e) {
            if (ways[e] == 0.0) continue;
            for (int ei = 0; e + ei <= max_e; ++ei)
                next[e + ei] += ways[e] * std::pow(static_cast<double>(p), static_cast<double>(ei * free_entries));
        }
        ways = std::move(next);
    }
    double total = 0.0;
    for (double w : ways) total += w;
    return total;
}

namespace detail {

/// All primitive canonical HNFs with det p^e, e <= max_e.
inline std::vector<LatticeClass> primitive_hnfs(int d, std::int64_t p, int max_e) {
    std::vector<LatticeClass> out;
    std::vector<int> diag_exp(d, 0);
    std::vector<std::int64_t> h(static_cast<std::size_t>(d) * d, 0);

    // Recurse over the off-diagonal entries of a fixed diagonal.
    std::function<void(int)> fill = [&](int slot) {
        // slots enumerate (i, j) with j > i, row-major.
        int idx = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j, ++idx) {
                if (idx != slot) continue;
                const std::int64_t mod = h[static_cast<std::size_t>(i) * d + i];
                for (std::int64_t v = 0; v < mod; ++v) {
                    h[static_cast<std::size_t>(i) * d + j] = v;
                    fill(slot + 1);
                }
                h[static_cast<std::size_t>(i) * d + j] = 0;
                return;
            }
        bool primitive = false;
        for (auto v : h)
            if (v % p != 0) {
                primitive = true;
                break;
            }
        if (primitive) out.emplace_back(d, h);
    };

    std::function<void(int, int)> choose_diag = [&](int row, int used) {
        if (row == d) {
            for (int i = 0; i < d; ++i) h[static_cast<std::size_t>(i) * d + i] = arith::ipow64(p, diag_exp[i]);
            fill(0);
            return;
        }
        for (int e = 0; used + e <= max_e; ++e) {
            diag_exp[row] = e;
            choose_diag(row + 1, used + e);
        }
    };
    choose_diag(0, 0);
    return out;
}

/// Sublattices S Z^d with p Z^d < S Z^d < Z^d (proper on both sides), as HNFs.
inline std::vector<IntMatrix> neighbour_steps(int d, std::int64_t p) {
    std::vector<IntMatrix> steps;
    const IntMatrix p_identity = IntMatrix::identity(d).scaled(p);
    for (int mask = 1; mask < (1 << d) - 1; ++mask) {
        // Rows in `mask` get diagonal p; the rest diagonal 1.
        IntMatrix s = IntMatrix::identity(d);
        std::vector<std::pair<int, int>> free;
        for (int i = 0; i < d; ++i) {
            if (mask & (1 << i)) s(i, i) = p;
            for (int j = i + 1; j < d; ++j)
                if (mask & (1 << i)) free.emplace_back(i, j);
        }
        std::function<void(std::size_t)> rec = [&](std::size_t k) {
            if (k == free.size()) {
                if (lattice_contains(s, 0, p_identity, 0, p)) steps.push_back(s);
                return;
            }
            for (std::int64_t v = 0; v < p; ++v) {
                s(free[k].first, free[k].second) = v;
                rec(k + 1);
            }
            s(free[k].first, free[k].second) = 0;
        };
        rec(0);
    }
    return steps;
}

}  // namespace detail

/// Brute-force oracle for the sphere counts. Generates every primitive HNF
/// with det p^e, e <= k_max (d-1), then runs a BFS from the base class where
/// edges are verified by `adjacent`. Returns classes within distance k_max
/// sorted by (distance, HNF).
inline std::vector<ClassAtDistance> enumerate_classes(const BuildingParams& bp, int k_max,
                                                      const EnumerationLimits& limits = {}) {
    if (k_max < 0) throw DomainError("enumerate_classes: k_max must be >= 0");
    const int d = bp.d();
    const std::int64_t p = bp.p();
    const int max_e = k_max * (d - 1);
    const double estimate = estimate_hnf_count(d, p, max_e);
    if (estimate > limits.max_classes)
        throw BudgetError("enumerate_classes: class budget exceeded", estimate, limits.max_classes);
    if (static_cast<double>(max_e) * std::log2(static_cast<double>(p)) > 60.0)
        throw BudgetError("enumerate_classes: HNF entries exceed 64 bits", std::pow(p, max_e), 1.15e18);

    const std::vector<LatticeClass> vertices = detail::primitive_hnfs(d, p, max_e);
    std::unordered_map<LatticeClass, int, LatticeClassHash> dist;
    dist.reserve(vertices.size() * 2);
    for (const auto& v : vertices) dist.emplace(v, -1);

    const std::vector<IntMatrix> steps = detail::neighbour_steps(d, p);
    std::vector<std::int64_t> id(static_cast<std::size_t>(d) * d, 0);
    for (int i = 0; i < d; ++i) id[static_cast<std::size_t>(i) * d + i] = 1;
    const LatticeClass base(d, id);

    std::deque<LatticeClass> queue{base};
    dist.at(base) = 0;
    while (!queue.empty()) {
        const LatticeClass cur = queue.front();
        queue.pop_front();
        const int dc = dist.at(cur);
        if (dc == k_max) continue;
        const IntMatrix cm = cur.matrix();
        for (const auto& s : steps) {
            const LatticeClass nb = canonical_class(cm * s, p);
            auto it = dist.find(nb);
            if (it == dist.end())
                throw std::logic_error("enumerate_classes: neighbour of an inner vertex missing from the HNF set");
            if (it->second >= 0) continue;
            if (!adjacent(cur, nb, p)) throw std::logic_error("enumerate_classes: generated step fails adjacency test");
            it->second = dc + 1;
            queue.push_back(nb);
        }
    }

    std::vector<ClassAtDistance> out;
    for (const auto& [cls, k] : dist)
        if (k >= 0) out.push_back({cls, k});
    std::sort(out.begin(), out.end(), [](const ClassAtDistance& a, const ClassAtDistance& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.lattice < b.lattice;
    });
    return out;
}

/// Neighbours of a class in the 1-skeleton (all of them, no budget).
inline std::vector<LatticeClass> neighbours(const LatticeClass& c, std::int64_t p) {
    std::vector<LatticeClass> out;
    const IntMatrix cm = c.matrix();
    for (const auto& s : detail::neighbour_steps(c.d(), p)) out.push_back(canonical_class(cm * s, p));
    std::sort(out.begin(), out.end());
    return out;
}

/// Per-distance histogram of an enumeration, index = distance.
inline std::vector<std::int64_t> distance_histogram(const std::vector<ClassAtDistance>& classes) {
    std::vector<std::int64_t> h;
    for (const auto& c : classes) {
        if (static_cast<std::size_t>(c.distance) >= h.size()) h.resize(c.distance + 1, 0);
        ++h[c.distance];
    }
    return h;
}

/// One JSON object per line: {"hnf": [[...]], "distance": k, "snf": [a_1,...]}.
inline void write_classes_jsonl(std::ostream& os, const std::vector<ClassAtDistance>& classes, std::int64_t p) {
    for (const auto& c : classes) {
        const ElemDivisorType t = snf_exponents(c.lattice.matrix(), p);
        os << "{\"hnf\": " << c.lattice.to_string() << ", \"distance\": " << c.distance << ", \"snf\": [";
        for (std::size_t i = 0; i < t.exponents.size(); ++i) os << (i ? "," : "") << t.exponents[i];
        os << "]}\n";
    }
}

}  // namespace heightgrowth::building
