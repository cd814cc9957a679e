#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <unordered_map>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "adelic.hpp"
#include "archimedean.hpp"
#include "arith.hpp"
#include "building.hpp"
#include "errors.hpp"
#include "int_matrix.hpp"
#include "parallel.hpp"

namespace heightgrowth::counting {

/// Element of PGL_2(Q) held as its unique primitive integer representative
/// whose first nonzero entry (row-major) is positive.
class GroupElementQ {
public:
    GroupElementQ(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) : m_{a, b, c, d} {
        if (a * d - b * c == 0) throw SingularMatrixError();
        const std::int64_t g = std::gcd(std::gcd(a, b), std::gcd(c, d));
        for (auto& v : m_) v /= g;
        for (auto v : m_) {
            if (v == 0) continue;
            if (v < 0)
                for (auto& w : m_) w = -w;
            break;
        }
    }

    static bool is_normalized(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
        if (a * d - b * c == 0) return false;
        if (std::gcd(std::gcd(a, b), std::gcd(c, d)) != 1) return false;
        const std::int64_t first = a ? a : b ? b : c ? c : d;
        return first > 0;
    }

    const std::array<std::int64_t, 4>& entries() const { return m_; }
    std::int64_t det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
    IntMatrix matrix() const { return IntMatrix{{m_[0], m_[1]}, {m_[2], m_[3]}}; }

    auto operator<=>(const GroupElementQ&) const = default;
    bool operator==(const GroupElementQ&) const = default;

private:
    std::array<std::int64_t, 4> m_;
};

struct GroupElementHash {
    std::size_t operator()(const GroupElementQ& g) const noexcept {
        std::size_t h = 0;
        for (auto v : g.entries()) h = h * 1000003u ^ std::hash<std::int64_t>{}(v);
        return h;
    }
};

/// Height of a normalized 2x2 representative. For primitive M the finite
/// part is |det M| and the archimedean part is (s1/s2)^{1/(2B)}, where
/// s1/s2 = (F + sqrt(F^2 - 4 det^2)) / (2 |det|), F the squared Frobenius norm.
inline double height_pgl2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, double B) {
    const double det = std::abs(static_cast<double>(a * d - b * c));
    const double F = static_cast<double>(a * a + b * b + c * c + d * d);
    const double disc = std::max(0.0, (F - 2 * det) * (F + 2 * det));
    const double ratio = (F + std::sqrt(disc)) / (2 * det);
    return det * std::pow(ratio, 1.0 / (2 * B));
}

/// Every normalized element with h <= x has entries bounded by s1, and
/// s1^2 = e (s1/s2) <= e (x/e)^{2B} with e = |det| <= x.
inline std::int64_t entry_bound(double x, double B) {
    if (!(x >= 1.0)) throw DomainError("entry_bound: x must be >= 1");
    if (!(B > 0.0)) throw DomainError("entry_bound: B must be positive");
    double best = 0.0;
    const auto e_max = static_cast<std::int64_t>(std::floor(x));
    for (std::int64_t e = 1; e <= e_max; ++e) {
        const double ed = static_cast<double>(e);
        best = std::max(best, std::sqrt(ed * std::pow(x / ed, 2 * B)));
    }
    return static_cast<std::int64_t>(std::floor(best * (1.0 + 1e-12)));
}

struct EnumerationBudget {
    double max_cells = 1e9;
};

inline void check_box(std::int64_t bound, const EnumerationBudget& budget) {
    if (bound < 1) throw DomainError("enumerate_elements: bound must be >= 1");
    const double cells = std::pow(2.0 * static_cast<double>(bound) + 1.0, 4);
    if (cells > budget.max_cells) throw BudgetError("enumerate_elements: search box exceeds budget", cells, budget.max_cells);
}

/// Calls visit(a, b, c, d) for each normalized primitive nonsingular matrix
/// with entries in [-bound, bound], in lexicographic order.
template <class Visit>
void enumerate_elements(std::int64_t bound, const Visit& visit, const EnumerationBudget& budget = {}) {
    check_box(bound, budget);
    for (std::int64_t a = 0; a <= bound; ++a)
        for (std::int64_t b = a ? -bound : 0; b <= bound; ++b)
            for (std::int64_t c = (a || b) ? -bound : 0; c <= bound; ++c)
                for (std::int64_t d = (a || b || c) ? -bound : 1; d <= bound; ++d)
                    if (GroupElementQ::is_normalized(a, b, c, d)) visit(a, b, c, d);
}

inline std::vector<GroupElementQ> collect_elements(std::int64_t bound, const EnumerationBudget& budget = {}) {
    std::vector<GroupElementQ> out;
    enumerate_elements(bound, [&](auto a, auto b, auto c, auto d) { out.emplace_back(a, b, c, d); }, budget);
    return out;
}

/// Heights of all elements in a search box, sorted.
class HeightCensus {
public:
    static constexpr double tie_tolerance = 1e-9;

    HeightCensus(std::int64_t bound, double B, int workers = 1, const EnumerationBudget& budget = {})
        : bound_(bound), B_(B) {
        check_box(bound, budget);
        if (!(B > 0.0)) throw DomainError("HeightCensus: B must be positive");
        // One slice per value of the leading entry a; slices concatenate in order.
        const auto slices = static_cast<std::size_t>(bound + 1);
        std::vector<std::vector<double>> part(slices);
        parallel::for_chunks(slices, workers, [&](std::size_t s) {
            const auto a = static_cast<std::int64_t>(s);
            for (std::int64_t b = a ? -bound : 0; b <= bound; ++b)
                for (std::int64_t c = (a || b) ? -bound : 0; c <= bound; ++c)
                    for (std::int64_t d = (a || b || c) ? -bound : 1; d <= bound; ++d)
                        if (GroupElementQ::is_normalized(a, b, c, d)) part[s].push_back(height_pgl2(a, b, c, d, B));
        });
        for (auto& p : part) heights_.insert(heights_.end(), p.begin(), p.end());
        std::sort(heights_.begin(), heights_.end());
    }

    std::int64_t bound() const { return bound_; }
    double B() const { return B_; }
    const std::vector<double>& heights() const { return heights_; }

    /// #{h <= x}, closed ball; heights within tie_tolerance (relative) of x count as inside.
    std::int64_t count(double x) const {
        const double edge = x * (1.0 + tie_tolerance);
        return std::upper_bound(heights_.begin(), heights_.end(), edge) - heights_.begin();
    }

    std::int64_t ties(double x) const {
        const auto lo = std::lower_bound(heights_.begin(), heights_.end(), x * (1.0 - tie_tolerance));
        const auto hi = std::upper_bound(heights_.begin(), heights_.end(), x * (1.0 + tie_tolerance));
        return hi - lo;
    }

private:
    std::int64_t bound_;
    double B_;
    std::vector<double> heights_;
};

struct PiCount {
    std::int64_t count;
    std::int64_t ties;
    std::int64_t bound;
};

inline PiCount pi_count_at_bound(double x, double B, std::int64_t bound, int workers = 1,
                                 const EnumerationBudget& budget = {}) {
    const HeightCensus census(bound, B, workers, budget);
    return {census.count(x), census.ties(x), bound};
}

inline PiCount pi_count(double x, double B, int workers = 1, const EnumerationBudget& budget = {}) {
    if (x < 0.0) throw DomainError("pi_count: x must be >= 0");
    if (x < 1.0) return {0, 0, 0};
    return pi_count_at_bound(x, B, entry_bound(x, B), workers, budget);
}

// ---------------------------------------------------------------------------
// Comparison with the asymptotic prediction

/// int_0^inf e^{-2t} b(t) dt for b the d = 2 archimedean ball at scale
/// `ball_B`; +inf when b grows like e^{2t} or faster.
inline double laplace_ball_integral(double ball_B) {
    if (!(ball_B > 0.0)) throw DomainError("laplace_ball_integral: B must be positive");
    const double growth = 2 * ball_B;
    if (growth >= 2.0) return INFINITY;
    const double upper = std::min(40.0 / (2.0 - growth), 700.0 / growth);
    auto f = [ball_B](double t) {
        return t <= 0.0 ? 0.0 : std::exp(-2 * t) * archimedean::ball_volume_numeric(2, ball_B, t);
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, upper, 15, 1e-12);
}

struct CountRow {
    double x;
    std::int64_t pi;
    std::int64_t ties;
    double predicted_convA;  // b^inf growing like e^{Bt}
    double predicted_convB;  // b^inf growing like e^{2Bt}
    double lower_sandwich;   // b(log x - eps) / covolume
    double upper_sandwich;   // b(log x + eps) / covolume
};

struct CountReport {
    double B;
    double covolume;
    double eps;
    std::int64_t entry_bound_used;
    double integral_convA;
    double integral_convB;
    std::vector<CountRow> rows;
};

/// pi(x) on a grid next to (30/pi^2) I x^2 / covolume for both exponent
/// conventions of I, and the ball-volume sandwich b(log x -+ eps).
inline CountReport compare_report(std::vector<double> x_grid, double B, double covolume, double eps = 0.1,
                                  int workers = 1, const EnumerationBudget& budget = {}) {
    if (x_grid.empty()) throw DomainError("compare_report: empty x grid");
    if (!(covolume > 0.0)) throw DomainError("compare_report: covolume must be positive");
    if (!(B > 0.0 && B < 2.0)) throw DomainError("compare_report: need 0 < B < 2");
    std::sort(x_grid.begin(), x_grid.end());
    const double x_max = x_grid.back();
    const std::int64_t N = x_max >= 1.0 ? entry_bound(x_max, B) : 1;
    const HeightCensus census(N, B, workers, budget);

    CountReport rep{B, covolume, eps, N, laplace_ball_integral(B / 2), laplace_ball_integral(B), {}};
    const double k = 30.0 / (std::numbers::pi * std::numbers::pi);
    const double T_top = std::log(std::max(x_max, 1.0)) + eps;
    std::optional<adelic::AdelicBall> ball;
    if (T_top > 0.0) ball.emplace(2, B, T_top + 0.01, adelic::AdelicOptions{.workers = workers});
    for (double x : x_grid) {
        CountRow row{x, x >= 1.0 ? census.count(x) : 0, x >= 1.0 ? census.ties(x) : 0, 0, 0, 0, 0};
        row.predicted_convA = k * rep.integral_convA * x * x / covolume;
        row.predicted_convB = k * rep.integral_convB * x * x / covolume;
        if (x > 0.0 && ball) {
            row.lower_sandwich = (*ball)(std::log(x) - eps) / covolume;
            row.upper_sandwich = (*ball)(std::log(x) + eps) / covolume;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Finite heights against the building

struct BuildingCheck {
    std::int64_t checked;     // elements with det supported on the primes
    std::int64_t mismatches;  // local BFS distance != SNF spread, or h_fin != |det|
};

/// For every element in the box whose determinant is supported on `primes`,
/// locates the class of M Z_p^2 in the BFS enumeration and compares the
/// distance with the Smith-form spread.
inline BuildingCheck check_heights_against_buildings(std::int64_t bound, const std::vector<std::int64_t>& primes,
                                                     const EnumerationBudget& budget = {}) {
    check_box(bound, budget);
    const double det_max = 2.0 * static_cast<double>(bound) * static_cast<double>(bound);
    std::map<std::int64_t, std::unordered_map<building::LatticeClass, int, building::LatticeClassHash>> dist;
    for (auto p : primes) {
        const int k = static_cast<int>(std::floor(std::log(det_max) / std::log(static_cast<double>(p)) + 1e-9));
        auto& table = dist[p];
        for (const auto& c : building::enumerate_classes(building::BuildingParams(2, p), k)) table.emplace(c.lattice, c.distance);
    }
    BuildingCheck out{0, 0};
    enumerate_elements(
        bound,
        [&](auto a, auto b, auto c, auto d) {
            std::int64_t rest = std::abs(a * d - b * c);
            for (auto p : primes)
                while (rest % p == 0) rest /= p;
            if (rest != 1) return;
            ++out.checked;
            const GroupElementQ g(a, b, c, d);
            const IntMatrix m = g.matrix();
            BigInt h_fin = 1;
            bool ok = true;
            for (auto p : primes) {
                const int snf = building::building_distance(m, p);
                const auto it = dist.at(p).find(building::local_class(m, p));
                if (it == dist.at(p).end() || it->second != snf) ok = false;
                h_fin *= arith::ipow(p, static_cast<unsigned>(snf));
            }
            if (h_fin != std::abs(g.det())) ok = false;
            if (!ok) ++out.mismatches;
        },
        budget);
    return out;
}

}  // namespace heightgrowth::counting
