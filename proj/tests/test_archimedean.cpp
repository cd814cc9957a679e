#include <heightgrowth/archimedean.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"

namespace hg = heightgrowth;
namespace ar = heightgrowth::archimedean;
using ar::ChamberVector;
using ar::NormParams;

namespace {

std::vector<double> random_trace_zero(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g(0.0, 2.0);
    std::vector<double> x(d);
    for (auto& v : x) v = g(rng);
    return ChamberVector::project(x).values();
}

Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

/// Monte-Carlo volume of {y <= rho(X) <= y + delta} in the normalized measure,
/// sampling simple-root coordinates in a box and mapping them to X directly.
double slab_volume(int d, double y, double delta, int samples, std::uint64_t seed) {
    const int r = d - 1;
    // fundamental coweights: omega_k = (1,..,1,0,..,0) - k/d
    Eigen::MatrixXd omega(d, r);
    for (int k = 1; k <= r; ++k)
        for (int i = 0; i < d; ++i) omega(i, k - 1) = (i < k ? 1.0 : 0.0) - double(k) / d;
    const double gram = std::sqrt((omega.transpose() * omega).determinant());
    double wnorm = 0.0;
    for (int i = 0; i < d; ++i) wnorm += std::pow((d - 1 - 2.0 * i) / 2.0, 2);
    const double scale = std::pow(std::sqrt(wnorm), r) * gram;
    std::vector<double> top(r);
    double box = 1.0;
    for (int k = 1; k <= r; ++k) {
        top[k - 1] = (y + delta) / (k * (d - k) / 2.0);
        box *= top[k - 1];
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long hits = 0;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd t(r);
        for (int k = 0; k < r; ++k) t[k] = u(rng) * top[k];
        const Eigen::VectorXd X = omega * t;
        double rho = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) rho += (X[i] - X[j]) / 2.0;
        if (rho >= y && rho <= y + delta) ++hits;
    }
    return box * scale * double(hits) / samples;
}

}  // namespace

TEST(RootSystem, Counts) {
    for (int d = 2; d <= 7; ++d) {
        const ar::RootSystemA sys(d);
        EXPECT_EQ(sys.rank(), d - 1);
        EXPECT_EQ(sys.positive_root_count(), d * (d - 1) / 2);
        EXPECT_EQ(static_cast<int>(sys.positive_roots().size()), d * (d - 1) / 2);
        const auto w = sys.rho_covector();
        double n2 = 0.0;
        for (double v : w) n2 += v * v;
        EXPECT_NEAR(std::sqrt(n2), sys.rho_norm(), 1e-12);
    }
    EXPECT_THROW(ar::RootSystemA(1), hg::DomainError);
}

TEST(RootSystem, RhoForms) {
    std::mt19937_64 rng(3);
    for (int d = 2; d <= 6; ++d) {
        const ar::RootSystemA sys(d);
        for (int t = 0; t < 50; ++t) {
            const ChamberVector x(random_trace_zero(rng, d));
            const auto w = sys.rho_covector();
            double via_w = 0.0, via_simple = 0.0;
            for (int i = 0; i < d; ++i) via_w += w[i] * x[i];
            const auto c = sys.rho_simple_coefficients();
            for (int k = 0; k < d - 1; ++k) via_simple += c[k] * (x[k] - x[k + 1]);
            EXPECT_NEAR(ar::rho(x), via_w, 1e-12);
            EXPECT_NEAR(ar::rho(x), via_simple, 1e-12);
            EXPECT_GE(ar::rho(x.dominant()), 0.0);
        }
    }
}

TEST(ChamberVector, Validation) {
    EXPECT_THROW(ChamberVector({1.0, 0.0}), hg::DomainError);
    EXPECT_NO_THROW(ChamberVector({1.0, -1.0 + 1e-14}));
    const ChamberVector x({-1.0, 2.0, -1.0});
    EXPECT_EQ(x.dominant().values(), (std::vector<double>{2.0, -1.0, -1.0}));
    EXPECT_FALSE(x.is_dominant());
}

TEST(NormB, Examples) {
    EXPECT_EQ(ar::norm_B(ChamberVector({0.0, 0.0, 0.0}), NormParams(3.0)), 0.0);
    EXPECT_DOUBLE_EQ(ar::norm_B(ChamberVector({1.0, -1.0}), NormParams(1.0)), 1.0);
    EXPECT_DOUBLE_EQ(ar::norm_B(ChamberVector({1.0, 0.0, -1.0}), NormParams(1.0)), 2.0);
    EXPECT_THROW(NormParams(0.0), hg::DomainError);
}

TEST(NormB, IsAWeylInvariantNorm) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> scale(-3.0, 3.0);
    for (int d = 2; d <= 6; ++d) {
        const NormParams np(0.7);
        for (int t = 0; t < 1000 / 5; ++t) {
            const auto xv = random_trace_zero(rng, d), yv = random_trace_zero(rng, d);
            const ChamberVector x(xv), y(yv);
            std::vector<double> s(d);
            for (int i = 0; i < d; ++i) s[i] = xv[i] + yv[i];
            EXPECT_LE(ar::norm_B(ChamberVector(s), np), ar::norm_B(x, np) + ar::norm_B(y, np) + 1e-10);
            const double a = scale(rng);
            std::vector<double> ax(d);
            for (int i = 0; i < d; ++i) ax[i] = a * xv[i];
            EXPECT_NEAR(ar::norm_B(ChamberVector(ax), np), std::abs(a) * ar::norm_B(x, np), 1e-10);
            EXPECT_NEAR(ar::norm_B(x.dominant(), np), ar::rho(x.dominant()) / np.B, 1e-12);
            std::vector<double> perm = xv;
            if (d <= 4) {
                std::sort(perm.begin(), perm.end());
                do {
                    EXPECT_NEAR(ar::norm_B(ChamberVector(perm), np), ar::norm_B(x, np), 1e-12);
                } while (std::next_permutation(perm.begin(), perm.end()));
            } else {
                for (int k = 0; k < 20; ++k) {
                    std::shuffle(perm.begin(), perm.end(), rng);
                    EXPECT_NEAR(ar::norm_B(ChamberVector(perm), np), ar::norm_B(x, np), 1e-12);
                }
            }
        }
    }
}

TEST(CartanDensity, Examples) {
    EXPECT_EQ(ar::cartan_density(ChamberVector({0.0, 0.0}), ar::RootSystemA(2)), 0.0);
    EXPECT_NEAR(ar::cartan_density(ChamberVector({1.0, -1.0}), ar::RootSystemA(2)), std::sinh(2.0), 1e-14);
    EXPECT_NEAR(ar::cartan_density(ChamberVector({1.0, 0.0, -1.0}), ar::RootSystemA(3)),
                std::sinh(1.0) * std::sinh(1.0) * std::sinh(2.0), 1e-13);
    EXPECT_NEAR(ar::cartan_density(ChamberVector({1.0, 0.0, -1.0}), ar::RootSystemA(3)), 5.00905, 1e-5);
    EXPECT_THROW(ar::cartan_density(ChamberVector({-1.0, 1.0}), ar::RootSystemA(2)), hg::DomainError);
}

TEST(BallVolume, ClosedFormD2) {
    for (double B : {0.5, 1.0, 2.0})
        for (double R : {0.01, 0.5, 1.0, 3.0, 5.0, 8.0}) {
            const double exact = (std::cosh(2 * B * R) - 1) / 2;
            EXPECT_NEAR(ar::ball_volume_numeric(2, B, R) / exact, 1.0, 1e-9) << B << " " << R;
        }
    EXPECT_NEAR(ar::ball_volume_numeric(2, 1, 1), 1.38109, 1e-5);
    EXPECT_LT(ar::ball_volume_numeric(2, 1, 1e-6), 1e-11);
    EXPECT_EQ(ar::ball_volume_numeric(2, 1, 0.0), 0.0);
    EXPECT_THROW(ar::ball_volume_numeric(2, 1, -1.0), hg::DomainError);
}

TEST(BallVolume, D3AgainstNestedSimpson) {
    const double jac = std::pow(std::sqrt(2.0), 2) / std::sqrt(3.0);
    for (double R : {0.5, 1.0, 2.0}) {
        // rho = t1 + t2 at d = 3; integrate over t1 + t2 <= R
        auto inner = [R](double t1) {
            return oracle::simpson([t1](double t2) { return std::sinh(t1) * std::sinh(t2) * std::sinh(t1 + t2); },
                                   0.0, R - t1, 400);
        };
        const double expect = jac * oracle::simpson(inner, 0.0, R, 400);
        EXPECT_NEAR(ar::ball_volume_numeric(3, 1.0, R) / expect, 1.0, 1e-7) << R;
    }
}

TEST(BallVolume, MeshRefinementAndMonotonicity) {
    const double a = ar::ball_volume_numeric(3, 1.0, 1.0, 5);
    const double b = ar::ball_volume_numeric(3, 1.0, 1.0, 10);
    EXPECT_LT(std::abs(a / b - 1.0), 1e-5);
    for (int d : {2, 3, 4}) {
        double prev = 0.0;
        for (double R = 0.25; R <= 3.0; R += 0.25) {
            const auto v = ar::ball_volume_detailed(d, 1.0, R, 8);
            EXPECT_GT(v.value, prev);
            EXPECT_LE(v.error_estimate, 1e-6 * v.value);
            prev = v.value;
        }
    }
}

TEST(BallVolume, RefinementBudget) {
    hg::quadrature::AdaptiveOptions opt;
    opt.rel_tol = 1e-15;
    opt.max_cells = 3;
    EXPECT_THROW(ar::ball_volume_detailed(4, 1.0, 3.0, 3, opt), hg::ConvergenceError);
}

TEST(SimplexArea, ClosedFormAndConvention) {
    EXPECT_EQ(ar::simplex_area(2), 1.0);
    for (int d = 3; d <= 8; ++d) {
        const ar::RootSystemA sys(d);
        const int r = d - 1;
        double prod = 1.0, fact = 1.0;
        for (int k = 1; k <= r; ++k) prod *= k * (d - k) / 2.0;
        for (int k = 2; k <= r - 1; ++k) fact *= k;
        const double closed = std::pow(sys.rho_norm(), r) / (std::sqrt(double(d)) * fact * prod);
        EXPECT_NEAR(ar::simplex_area(d), closed, 1e-12 * closed) << d;
    }
}

TEST(SimplexArea, MonteCarloSlab) {
    const double delta = 0.02;
    for (int d : {3, 4}) {
        const int r = d - 1;
        const double a = ar::simplex_area(d);
        for (double y : {1.0, 2.0}) {
            const double mc = slab_volume(d, y, delta, 2000000, 17 + d);
            const double expect = a * (std::pow(y + delta, r) - std::pow(y, r)) / r;
            EXPECT_NEAR(mc / expect, 1.0, 0.03) << "d=" << d << " y=" << y;
            // leading term a y^{r-1} delta
            EXPECT_NEAR(mc / (a * std::pow(y, r - 1) * delta), 1.0, 0.05);
        }
    }
}

TEST(GrowthFit, ExactFamilies) {
    std::vector<ar::GrowthSample> e2, re;
    for (int i = 0; i < 20; ++i) {
        const double R = 1.0 + 0.5 * i;
        e2.push_back({R, std::exp(2 * R)});
        re.push_back({R, R * std::exp(R)});
    }
    const auto f1 = ar::growth_exponent_fit(e2);
    EXPECT_NEAR(f1.slope, 2.0, 1e-6);
    EXPECT_NEAR(f1.poly_degree, 0.0, 1e-6);
    const auto f2 = ar::growth_exponent_fit(re);
    EXPECT_NEAR(f2.slope, 1.0, 1e-3);
    EXPECT_NEAR(f2.poly_degree, 1.0, 1e-3);
}

TEST(GrowthFit, CartanVolumesD2) {
    std::vector<ar::GrowthSample> s;
    for (int i = 0; i <= 50; ++i) {
        const double R = 5.0 + 0.1 * i;
        s.push_back({R, ar::ball_volume_numeric(2, 1.0, R)});
    }
    const auto f = ar::growth_exponent_fit(s);
    EXPECT_NEAR(f.slope, 2.0, 0.02);
    EXPECT_NEAR(f.poly_degree, 0.0, 0.05);
}

TEST(GrowthFit, Rejections) {
    std::vector<ar::GrowthSample> few{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
    EXPECT_THROW(ar::growth_exponent_fit(few), hg::DomainError);
    std::vector<ar::GrowthSample> narrow;
    for (int i = 0; i < 10; ++i) narrow.push_back({1.0 + 0.1 * i, std::exp(1.0 + 0.1 * i)});
    EXPECT_THROW(ar::growth_exponent_fit(narrow), hg::DomainError);
}

TEST(ArchimedeanHeight, Examples) {
    EXPECT_NEAR(ar::archimedean_height(Eigen::Matrix3d::Identity(), 0.3).value, 1.0, 1e-15);
    Eigen::Matrix2d m;
    m << 2, 0, 0, 0.5;
    EXPECT_NEAR(ar::archimedean_height(m, 1.0).value, 2.0, 1e-12);
    std::mt19937_64 rng(8);
    EXPECT_NEAR(ar::archimedean_height(random_orthogonal(rng, 4), 1.0).value, 1.0, 1e-12);
    Eigen::Matrix2d s;
    s << 1, 2, 2, 4;
    EXPECT_THROW(ar::archimedean_height(s, 1.0), hg::SingularMatrixError);
    Eigen::Matrix2d bad;
    bad << 1, 0, 0, 1e-15;
    EXPECT_TRUE(ar::archimedean_height(bad, 1.0).ill_conditioned);
}

TEST(ArchimedeanHeight, BiInvariantAndScaling) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int d = 2; d <= 5; ++d)
        for (int t = 0; t < 30; ++t) {
            Eigen::MatrixXd m(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) m(i, j) = g(rng);
            const double h = ar::archimedean_height(m, 1.0).value;
            const auto k1 = random_orthogonal(rng, d), k2 = random_orthogonal(rng, d);
            EXPECT_NEAR(ar::archimedean_height(m * k1, 1.0).value / h, 1.0, 1e-9);
            EXPECT_NEAR(ar::archimedean_height(k2 * m, 1.0).value / h, 1.0, 1e-9);
            EXPECT_NEAR(ar::archimedean_height(3.5 * m, 1.0).value / h, 1.0, 1e-9);
            for (double B : {0.25, 2.0, 5.0})
                EXPECT_NEAR(std::pow(ar::archimedean_height(m, B).value, B) / h, 1.0, 1e-9);
        }
}
