#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace heightgrowth::archimedean {

using RealMatrix = Eigen::MatrixXd;

/// Root data of type A_{d-1} acting on trace-zero vectors of length d.
/// Positive roots are X -> X_i - X_j for i < j, all of multiplicity one.
class RootSystemA {
public:
    explicit RootSystemA(int d) : d_(d) {
        if (d < 2) throw DomainError("RootSystemA: d must be >= 2");
    }

    int d() const { return d_; }
    int rank() const { return d_ - 1; }
    int positive_root_count() const { return d_ * (d_ - 1) / 2; }

    std::vector<std::pair<int, int>> positive_roots() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < d_; ++i)
            for (int j = i + 1; j < d_; ++j) out.emplace_back(i, j);
        return out;
    }

    /// Coefficients w with rho(X) = sum_i w_i X_i; w_i = (d + 1 - 2i)/2 for
    /// i = 1..d.
    std::vector<double> rho_covector() const {
        std::vector<double> w(d_);
        for (int i = 0; i < d_; ++i) w[i] = (d_ - 1 - 2.0 * i) / 2.0;
        return w;
    }

    /// Euclidean length of rho in the standard inner product on the
    /// trace-zero hyperplane: sqrt(d(d^2 - 1)/12).
    double rho_norm() const { return std::sqrt(d_ * (d_ * d_ - 1.0) / 12.0); }

    /// rho on simple-root coordinates t_k = X_k - X_{k+1}: coefficient
    /// k(d-k)/2 for k = 1..r.
    std::vector<double> rho_simple_coefficients() const {
        std::vector<double> c(rank());
        for (int k = 1; k <= rank(); ++k) c[k - 1] = k * (d_ - k) / 2.0;
        return c;
    }

    /// Density of the normalized measure (rho a unit covector) with respect
    /// to Lebesgue measure in simple-root coordinates: |rho|^r / sqrt(d).
    double simple_coordinate_jacobian() const { return std::pow(rho_norm(), rank()) / std::sqrt(double(d_)); }

private:
    int d_;
};

/// Trace-zero real vector.
class ChamberVector {
public:
    explicit ChamberVector(std::vector<double> x) : x_(std::move(x)) {
        if (x_.size() < 2) throw DomainError("ChamberVector: length must be >= 2");
        double sum = 0.0, scale = 1.0;
        for (double v : x_) {
            sum += v;
            scale = std::max(scale, std::abs(v));
        }
        if (std::abs(sum) > 1e-12 * scale) throw DomainError("ChamberVector: entries must sum to zero");
    }

    /// Orthogonal projection onto the trace-zero hyperplane.
    static ChamberVector project(std::vector<double> x) {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        for (double& v : x) v -= mean;
        return ChamberVector(std::move(x));
    }

    int d() const { return static_cast<int>(x_.size()); }
    double operator[](int i) const { return x_[i]; }
    const std::vector<double>& values() const { return x_; }

    /// Weyl-conjugate in the closed positive chamber (sorted descending).
    ChamberVector dominant() const {
        std::vector<double> y = x_;
        std::sort(y.begin(), y.end(), std::greater<>());
        return ChamberVector(std::move(y));
    }

    bool is_dominant(double tol = 1e-12) const {
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (x_[i] > x_[i - 1] + tol) return false;
        return true;
    }

private:
    std::vector<double> x_;
};

struct NormParams {
    double B;
    explicit NormParams(double b) : B(b) {
        if (!(b > 0.0)) throw DomainError("NormParams: B must be positive");
    }
};

inline double rho(const ChamberVector& x) {
    double r = 0.0;
    for (int i = 0; i < x.d(); ++i)
        for (int j = i + 1; j < x.d(); ++j) r += x[i] - x[j];
    return r / 2.0;
}

/// (1/2B) sum_{i<j} |X_i - X_j|.
inline double norm_B(const ChamberVector& x, const NormParams& params) {
    double s = 0.0;
    for (int i = 0; i < x.d(); ++i)
        for (int j = i + 1; j < x.d(); ++j) s += std::abs(x[i] - x[j]);
    return s / (2.0 * params.B);
}

/// prod_{i<j} sinh(X_i - X_j) on the closed positive chamber.
inline double cartan_density(const ChamberVector& x, const RootSystemA& sys) {
    if (x.d() != sys.d()) throw DomainError("cartan_density: dimension mismatch");
    if (!x.is_dominant()) throw DomainError("cartan_density: X must lie in the closed positive chamber");
    double r = 1.0;
    for (int i = 0; i < x.d(); ++i)
        for (int j = i + 1; j < x.d(); ++j) r *= std::sinh(x[i] - x[j]);
    return std::max(r, 0.0);
}

struct BallVolumeResult {
    double value;
    double error_estimate;
    std::size_t cells;
};

/// Volume of {dominant X : rho(X) <= B R} under the Cartan density, in the
/// measure where rho has unit covector length. `mesh` is the number of
/// Gauss nodes per collapsed direction in each cell.
inline BallVolumeResult ball_volume_detailed(int d, double B, double R, int mesh,
                                             quadrature::AdaptiveOptions opt = {}) {
    if (!(B > 0.0)) throw DomainError("ball_volume_numeric: B must be positive");
    if (R < 0.0) throw DomainError("ball_volume_numeric: R must be >= 0");
    if (mesh < 3) throw DomainError("ball_volume_numeric: mesh must be >= 3");
    if (R == 0.0) return {0.0, 0.0, 0};
    const RootSystemA sys(d);
    const int r = sys.rank();
    const auto coef = sys.rho_simple_coefficients();

    quadrature::Simplex dom;
    dom.vertices.assign(r + 1, quadrature::Point::Zero(r));
    for (int k = 0; k < r; ++k) dom.vertices[k + 1][k] = B * R / coef[k];

    const double jac = sys.simple_coordinate_jacobian();
    auto density = [r, jac](const quadrature::Point& t) {
        // root X_i - X_j = t_i + ... + t_{j-1}
        double prod = jac;
        for (int i = 0; i < r; ++i) {
            double a = 0.0;
            for (int j = i; j < r; ++j) {
                a += t[j];
                prod *= std::sinh(a);
            }
        }
        return prod;
    };
    opt.order = mesh;
    const auto q = quadrature::integrate_simplex(density, dom, opt);
    return {q.value, q.error_estimate, q.cells};
}

inline double ball_volume_numeric(int d, double B, double R, int mesh = 8) {
    return ball_volume_detailed(d, B, R, mesh).value;
}

/// F(1): (r-1)-volume of {dominant X : rho(X) = 1} with rho a unit covector;
/// 1 for d = 2. Vertices are the fundamental coweights scaled onto the face,
/// volume from the Gram determinant of the edge vectors.
inline double simplex_area(int d) {
    const RootSystemA sys(d);
    const int r = sys.rank();
    if (r == 1) return 1.0;
    const auto coef = sys.rho_simple_coefficients();
    std::vector<Eigen::VectorXd> verts;
    for (int k = 1; k <= r; ++k) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x[i] = (i < k ? 1.0 : 0.0) - static_cast<double>(k) / d;
        verts.push_back(x / coef[k - 1]);
    }
    Eigen::MatrixXd edges(d, r - 1);
    for (int k = 1; k < r; ++k) edges.col(k - 1) = verts[k] - verts[0];
    const double gram = (edges.transpose() * edges).determinant();
    double fact = 1.0;
    for (int k = 2; k <= r - 1; ++k) fact *= k;
    return std::pow(sys.rho_norm(), r - 1) * std::sqrt(gram) / fact;
}

struct GrowthFit {
    double slope;
    double poly_degree;
    double intercept;
};

struct GrowthSample {
    double R;
    double volume;
};

/// Least squares log vol = slope R + deg log R + const over the upper half
/// (largest R) of the samples.
inline GrowthFit growth_exponent_fit(const std::vector<GrowthSample>& samples) {
    if (samples.size() < 5) throw DomainError("growth_exponent_fit: need at least 5 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].volume > 0.0) || !(samples[i].R > 0.0))
            throw DomainError("growth_exponent_fit: R and volumes must be positive");
        if (i && !(samples[i].R > samples[i - 1].R)) throw DomainError("growth_exponent_fit: R must increase");
    }
    if (samples.back().R - samples.front().R < 2.0)
        throw DomainError("growth_exponent_fit: degenerate fit, samples span < 2 units of R");
    const std::size_t first = samples.size() / 2;
    const auto n = static_cast<Eigen::Index>(samples.size() - first);
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[first + static_cast<std::size_t>(i)];
        a(i, 0) = s.R;
        a(i, 1) = std::log(s.R);
        a(i, 2) = 1.0;
        y[i] = std::log(s.volume);
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
    return {c[0], c[1], c[2]};
}

struct ArchimedeanHeight {
    double value;                 // exp(norm_B(X))
    double log_value;             // norm_B(X) = d_infinity
    std::vector<double> singular_values;
    bool ill_conditioned;         // sigma_d / sigma_1 < 1e-14
};

/// Local height at infinity: singular values give the Cartan projection
/// X_i = log sigma_i - mean(log sigma), height exp(norm_B(X)).
inline ArchimedeanHeight archimedean_height(const RealMatrix& m, double B) {
    if (m.rows() != m.cols() || m.rows() < 2) throw DomainError("archimedean_height: need a square matrix, d >= 2");
    const NormParams params(B);
    Eigen::JacobiSVD<RealMatrix> svd(m);
    const Eigen::VectorXd sv = svd.singularValues();
    const auto d = static_cast<int>(sv.size());
    if (!(sv[d - 1] > 0.0)) throw SingularMatrixError();
    std::vector<double> logs(d);
    for (int i = 0; i < d; ++i) logs[i] = std::log(sv[i]);
    const ChamberVector x = ChamberVector::project(logs);
    const double dist = norm_B(x, params);
    return {std::exp(dist), dist, std::vector<double>(sv.data(), sv.data() + d), sv[d - 1] / sv[0] < 1e-14};
}

}  // namespace heightgrowth::archimedean
