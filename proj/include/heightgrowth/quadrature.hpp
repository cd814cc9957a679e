#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "errors.hpp"

namespace heightgrowth::quadrature {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    GaussRule r{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1,1] -> [0,1]
        r.nodes[i] = 0.5 * (1.0 - z);
        r.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        r.weights[i] = r.weights[n - 1 - i] = 0.5 * w;
    }
    return r;
}

using Point = Eigen::VectorXd;

/// An r-simplex in R^r given by its r+1 vertices.
struct Simplex {
    std::vector<Point> vertices;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }

    double volume() const {
        const int r = dim();
        Eigen::MatrixXd e(r, r);
        for (int k = 0; k < r; ++k) e.col(k) = vertices[k + 1] - vertices[0];
        double fact = 1.0;
        for (int k = 2; k <= r; ++k) fact *= k;
        return std::abs(e.determinant()) / fact;
    }

    /// Split across the midpoint of the longest edge.
    std::pair<Simplex, Simplex> bisect() const {
        int bi = 0, bj = 1;
        double best = -1.0;
        for (int i = 0; i <= dim(); ++i)
            for (int j = i + 1; j <= dim(); ++j) {
                const double len = (vertices[i] - vertices[j]).squaredNorm();
                if (len > best) {
                    best = len;
                    bi = i;
                    bj = j;
                }
            }
        const Point mid = 0.5 * (vertices[bi] + vertices[bj]);
        Simplex a = *this, b = *this;
        a.vertices[bj] = mid;
        b.vertices[bi] = mid;
        return {std::move(a), std::move(b)};
    }
};

/// Conical (collapsed-coordinate) product of 1-D Gauss-Legendre rules on a
/// simplex: u in [0,1]^r maps to barycentrics
/// (1-u1, u1(1-u2), ..., u1...ur) with Jacobian r! vol prod u_k^{r-k}.
template <class F>
double conical_product(const F& f, const Simplex& cell, const GaussRule& rule) {
    const int r = cell.dim();
    const int n = static_cast<int>(rule.nodes.size());
    double fact = 1.0;
    for (int k = 2; k <= r; ++k) fact *= k;
    const double scale = fact * cell.volume();
    std::vector<int> idx(r, 0);
    double total = 0.0;
    Point x(cell.vertices[0].size());
    for (;;) {
        double w = scale;
        double running = 1.0;  // u1 ... u_{k}
        x = cell.vertices[0] * (1.0 - rule.nodes[idx[0]]);
        for (int k = 0; k < r; ++k) {
            const double u = rule.nodes[idx[k]];
            w *= rule.weights[idx[k]] * std::pow(u, r - 1 - k);
            running *= u;
            const double lam = (k + 1 < r) ? running * (1.0 - rule.nodes[idx[k + 1]]) : running;
            x += lam * cell.vertices[k + 1];
        }
        total += w * f(x);
        int k = r - 1;
        while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
        if (k < 0) break;
    }
    return total;
}

struct AdaptiveOptions {
    int order = 8;  // Gauss nodes per collapsed direction
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_cells = 200000;
};

struct QuadResult {
    double value;
    double error_estimate;
    std::size_t cells;
};

/// Globally adaptive cubature over a simplex: the cell with the largest
/// error (difference between the order-n and order-(n-2) conical rules) is
/// bisected until the summed error meets the tolerance.
template <class F>
QuadResult integrate_simplex(const F& f, const Simplex& domain, const AdaptiveOptions& opt = {}) {
    if (opt.order < 3) throw DomainError("integrate_simplex: order must be >= 3");
    const GaussRule hi = gauss_legendre(opt.order);
    const GaussRule lo = gauss_legendre(opt.order - 2);

    struct Cell {
        Simplex s;
        double value;
        double error;
        std::size_t serial;
    };
    auto cmp = [](const Cell& a, const Cell& b) {
        if (a.error != b.error) return a.error < b.error;
        return a.serial > b.serial;
    };
    std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> heap(cmp);
    std::size_t serial = 0;
    auto eval = [&](Simplex s) {
        const double v = conical_product(f, s, hi);
        const double e = std::abs(v - conical_product(f, s, lo));
        return Cell{std::move(s), v, e, serial++};
    };

    heap.push(eval(domain));
    double total = heap.top().value;
    double err = heap.top().error;
    std::size_t cells = 1;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (cells >= opt.max_cells)
            throw ConvergenceError("integrate_simplex: refinement stalled at the cell budget");
        Cell worst = heap.top();
        heap.pop();
        auto [a, b] = worst.s.bisect();
        Cell ca = eval(std::move(a));
        Cell cb = eval(std::move(b));
        total += ca.value + cb.value - worst.value;
        err += ca.error + cb.error - worst.error;
        heap.push(std::move(ca));
        heap.push(std::move(cb));
        ++cells;
    }
    // Re-sum from the cells to shed drift from the running updates.
    double v = 0.0, e = 0.0;
    std::vector<Cell> rest;
    while (!heap.empty()) {
        rest.push_back(heap.top());
        heap.pop();
    }
    std::sort(rest.begin(), rest.end(), [](const Cell& x, const Cell& y) { return x.serial < y.serial; });
    for (const auto& c : rest) {
        v += c.value;
        e += c.error;
    }
    return {v, e, cells};
}

}  // namespace heightgrowth::quadrature
