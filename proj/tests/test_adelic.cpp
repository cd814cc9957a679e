#include <heightgrowth/adelic.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using heightgrowth::BigInt;
using heightgrowth::IntMatrix;
namespace hg = heightgrowth;
namespace ad = heightgrowth::adelic;

TEST(GlobalHeight, Examples) {
    const auto id = ad::global_height(IntMatrix::identity(2), 1.0);
    EXPECT_EQ(id.h, 1.0);
    EXPECT_TRUE(id.finite_exponents.empty());

    const auto m = ad::global_height(IntMatrix{{1, 0}, {0, 2}}, 1.0);
    EXPECT_EQ(m.h_fin, 2);
    EXPECT_NEAR(m.h_inf, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(m.h, 2 * std::sqrt(2.0), 1e-12);
    EXPECT_EQ(m.finite_exponents.at(2), 1);

    EXPECT_NEAR(ad::global_height(IntMatrix{{0, 1}, {1, 0}}, 1.0).h, 1.0, 1e-12);
    EXPECT_THROW(ad::global_height(IntMatrix{{2, 0}, {0, 2}}, 1.0), hg::DomainError);
    EXPECT_THROW(ad::global_height(IntMatrix{{1, 2}, {2, 4}}, 1.0), hg::SingularMatrixError);
}

TEST(GlobalHeight, SignedPermutationInvariance) {
    std::mt19937_64 rng(51);
    std::uniform_int_distribution<int> u(-12, 12);
    const std::vector<IntMatrix> perms{IntMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, -1}}, IntMatrix{{0, 0, 1}, {-1, 0, 0}, {0, 1, 0}},
                                       IntMatrix{{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    int done = 0;
    while (done < 60) {
        IntMatrix m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
        if (hg::determinant(m) == 0 || m.content() != 1) continue;
        ++done;
        const auto h = ad::global_height(m, 1.5);
        for (const auto& a : perms)
            for (const auto& b : perms) {
                const auto g = ad::global_height(a * m * b, 1.5);
                EXPECT_EQ(g.h_fin, h.h_fin);
                EXPECT_EQ(g.finite_exponents, h.finite_exponents);
                EXPECT_NEAR(g.h_inf / h.h_inf, 1.0, 1e-9);
            }
        double metric_sum = std::log(h.h_inf);
        for (const auto& [p, e] : h.finite_exponents) metric_sum += e * std::log(double(p));
        EXPECT_NEAR(h.log_h, metric_sum, 1e-9);
        EXPECT_GE(h.h, 1.0 - 1e-12);
    }
}

TEST(AdelicBall, OnlyBaseTermBelowLogTwo) {
    for (double T : {0.1, 0.4, 0.69}) {
        EXPECT_EQ(ad::adelic_ball_volume(2, 1.0, T), hg::archimedean::ball_volume_numeric(2, 1.0, T));
        EXPECT_NEAR(ad::adelic_ball_volume(2, 1.0, T), (std::cosh(2 * T) - 1) / 2, 1e-12);
    }
    EXPECT_THROW(ad::adelic_ball_volume(2, 1.0, 0.0), hg::DomainError);
}

TEST(AdelicBall, ComponentsAtLogFour) {
    const double T = std::log(4.0);
    const ad::AdelicBall ball(2, 1.0, T + 0.01);
    const auto c = ball.components(T);
    ASSERT_EQ(c.size(), 4u);
    const std::vector<double> weights{1, 3, 4, 6};
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(c[i].m, static_cast<std::int64_t>(i + 1));
        EXPECT_EQ(c[i].D, weights[i]);
        // closed form of b^inf at d = 2, B = 1; table interpolation error ~1e-7
        const double t = T - std::log(double(i + 1));
        EXPECT_NEAR(c[i].b_inf, (std::cosh(2 * t) - 1) / 2, 1e-6);
        sum += c[i].D * c[i].b_inf;
    }
    EXPECT_EQ(c[3].b_inf, 0.0);
    EXPECT_NEAR(ball(T), sum, 1e-12 * sum);
}

TEST(AdelicBall, MonotoneAndDominatesBase) {
    const ad::AdelicBall ball(2, 1.0, 6.01);
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double T = 0.06 * i;
        const double v = ball(T);
        EXPECT_GE(v, prev);
        EXPECT_GE(v, hg::archimedean::ball_volume_numeric(2, 1.0, T) * (1 - 1e-12));
        prev = v;
    }
}

TEST(AdelicBall, SeriesAgreesWithDirectSum) {
    const auto s = ad::ball_volume_series(2, 1.0, 3.0, 7.0);
    const ad::AdelicBall ball(2, 1.0, 7.01);
    for (std::size_t i = 0; i < s.T_grid.size(); i += 500)
        EXPECT_NEAR(s.values[i] / ball(s.T_grid[i]), 1.0, 1e-5) << s.T_grid[i];
    const auto s3 = ad::ball_volume_series(3, 4.0, 1.0, 2.0);
    const ad::AdelicBall b3(3, 4.0, 2.01);
    for (std::size_t i = 0; i < s3.T_grid.size(); i += 250) EXPECT_NEAR(s3.values[i] / b3(s3.T_grid[i]), 1.0, 1e-5);
}

TEST(AdelicBall, WorkerCountDoesNotChangeResult) {
    ad::AdelicOptions one, four;
    four.workers = 4;
    const ad::AdelicBall a(2, 1.0, 9.0, one), b(2, 1.0, 9.0, four);
    for (double T : {2.5, 6.0, 8.9}) EXPECT_EQ(a(T), b(T));
    EXPECT_EQ(ad::ball_volume_series(2, 1.0, 5, 6, one).values, ad::ball_volume_series(2, 1.0, 5, 6, four).values);
}

TEST(Prediction, ClosedFormAtD2) {
    for (double B : {2.5, 3.0}) {
        const auto p = ad::prediction_N(2, B, 1.5, 1.0);
        const double C = oracle::zeta_direct(B) * oracle::zeta_direct(B - 1) / oracle::zeta_direct(2 * B);
        EXPECT_NEAR(p.euler_constant / C, 1.0, 1e-8);
        EXPECT_NEAR(p.stated.value, C * std::exp(B * 1.5), 1e-7 * p.stated.value);
        EXPECT_NEAR(p.measured.value, C * std::exp(2 * B * 1.5), 1e-7 * p.measured.value);
        EXPECT_EQ(p.stated.exponent, B);
        EXPECT_EQ(p.measured.exponent, 2 * B);
        EXPECT_FALSE(p.below_threshold);
    }
}

TEST(Prediction, ConventionsAndErrors) {
    const auto t0 = ad::prediction_N(2, 3.0, 0.0, 1.0);
    EXPECT_NEAR(t0.stated.value, t0.euler_constant, 1e-15);
    const auto a = ad::prediction_N(3, 4.0, 2.0, 1.0), b = ad::prediction_N(3, 4.0, 2.0, 2.0);
    EXPECT_NEAR(b.stated.value, a.stated.value / 2, 1e-15 * a.stated.value);
    EXPECT_NEAR(a.stated.value, a.simplex_area * a.euler_constant * 4.0 * 2.0 * std::exp(8.0), 1e-10 * a.stated.value);
    EXPECT_TRUE(ad::prediction_N(4, 4.5, 1.0, 1.0).below_threshold);  // s_2(4) = 4.9069
    EXPECT_THROW(ad::prediction_N(2, 2.0, 1.0, 1.0), hg::DomainError);
    EXPECT_THROW(ad::prediction_N(2, 3.0, 1.0, 0.0), hg::DomainError);
}

namespace {

std::vector<double> nodes(double lo, double hi, double step) {
    std::vector<double> t;
    for (auto k = std::llround(lo / step); k <= std::llround(hi / step); ++k) t.push_back(double(k) * step);
    return t;
}

}  // namespace

TEST(Regularity, ModelFunctions) {
    const double step = 1e-5;
    const auto smooth = ad::regularity_report(
        ad::sample_function([](double x) { return x * std::exp(2 * x); }, 9.9, 12.1, step), {0.01, 0.001, 1e-4},
        nodes(10.0, 12.0, step));
    EXPECT_EQ(smooth.verdict, ad::Verdict::regular);
    EXPECT_TRUE(smooth.gap_shrinks);
    EXPECT_NEAR(smooth.rows.back().liminf_lower, 1.0, 1e-3);
    EXPECT_NEAR(smooth.rows.back().limsup_upper, 1.0, 1e-3);

    const double h = 1e-3;
    const auto jumps = ad::regularity_report(
        ad::sample_function([](double x) { return std::exp(std::floor(x + 1e-9)); }, 4.0, 21.0, h), {0.1, 0.01},
        nodes(5.0, 20.0, h));
    EXPECT_EQ(jumps.verdict, ad::Verdict::non_regular);
    EXPECT_NEAR(jumps.rows.back().liminf_lower, std::exp(-1.0), 1e-9);
    EXPECT_NEAR(jumps.rows.back().limsup_upper, std::exp(1.0), 1e-9);

    const auto tree = ad::regularity_report(
        ad::sample_function([](double x) { return double(ad::tree_ball(2, x)); }, 4.0, 21.0, h), {0.1, 0.01},
        nodes(5.0, 20.0, h));
    EXPECT_EQ(tree.verdict, ad::Verdict::non_regular);
    EXPECT_NEAR(tree.rows.back().liminf_lower, 0.5, 0.01);
}

TEST(Regularity, ResolutionAndThresholds) {
    // For e^x the gap at eps is e^eps - 1 exactly.
    const auto f = ad::sample_function([](double x) { return std::exp(x); }, 0.0, 10.0, 0.005);
    EXPECT_THROW(ad::regularity_report(f, {0.04}, nodes(1.0, 9.0, 0.005)), hg::DomainError);
    const auto mid = ad::regularity_report(f, {0.05}, nodes(1.0, 9.0, 0.005));
    EXPECT_EQ(mid.verdict, ad::Verdict::inconclusive);
    EXPECT_NEAR(mid.gap, std::exp(0.05) - 1, 1e-9);
    EXPECT_EQ(ad::regularity_report(f, {0.1}, nodes(1.0, 9.0, 0.005)).verdict, ad::Verdict::non_regular);
    EXPECT_EQ(ad::regularity_report(f, {0.1, 0.05}, nodes(1.0, 9.0, 0.005), {0.06, 0.2}).verdict, ad::Verdict::regular);
}

TEST(Regularity, AdelicBallD2IsRegular) {
    ad::AdelicOptions opt;
    opt.step = 5e-4;
    opt.sieve.max_entries = 2'000'000;
    const auto s = ad::ball_volume_series(2, 1.0, 7.8, 14.2, opt);
    const auto rep = ad::regularity_report(ad::to_sampled(s), {0.1, 0.05, 0.01, 0.005}, nodes(8.0, 14.0, 5e-4));
    EXPECT_EQ(rep.verdict, ad::Verdict::regular) << rep.gap;
    EXPECT_TRUE(rep.gap_shrinks);
}

TEST(TreeBall, Examples) {
    EXPECT_EQ(ad::tree_ball(2, 0.5), 1);
    EXPECT_EQ(ad::tree_ball(2, 1.0), 4);
    EXPECT_EQ(ad::tree_ball(2, 3.0), 22);
    EXPECT_THROW(ad::tree_ball(1, 1.0), hg::DomainError);
}

TEST(TreeBall, MatchesBuildingBallForPrimeValency) {
    for (std::int64_t q : {2, 3, 5})
        for (int k = 0; k <= 6; ++k)
            EXPECT_EQ(BigInt(ad::tree_ball(q, k)), hg::building::ball_size(hg::building::BuildingParams(2, q), k));
}

TEST(Persistence, ToyMeasures) {
    const ad::MeasurePair single({{0.0, 1.0}}, [](double t) { return std::exp(1.5 * t); }, 20.0, 0.0, 1.5);
    for (double T : {0.5, 3.0, 10.0}) EXPECT_NEAR(ad::persistence_check(single, T).ratio, 1.0, 1e-14);

    const ad::MeasurePair two({{0.0, 1.0}, {std::log(2.0), 1.0}}, [](double t) { return std::exp(2 * t); }, 20.0, 0.0, 2.0);
    EXPECT_NEAR(two.C(), 1.25, 1e-15);
    EXPECT_NEAR(ad::persistence_check(two, 0.5).ratio, 1.0 / 1.25, 1e-14);
    EXPECT_NEAR(ad::persistence_check(two, 5.0).ratio, 1.0, 1e-14);
    EXPECT_THROW(ad::persistence_check(two, 25.0), hg::DomainError);
}

TEST(Persistence, Pgl2CoefficientMeasure) {
    const double Tmax = 12.0;
    const auto x = ad::floor_exp(Tmax);
    const auto table = hg::dirichlet::coeff_sieve(2, x);
    std::vector<ad::PointMass> mu;
    for (std::int64_t m = 1; m <= x; ++m) mu.push_back({std::log(double(m)), hg::arith::to_double(table.at(m)) / double(m)});
    // the full measure has C = sum D(m)/m^3 = L(3)
    const double L3 = oracle::zeta_direct(3.0) * oracle::zeta_even(2) / oracle::zeta_even(6);
    const ad::MeasurePair pair(std::move(mu), [](double t) { return std::exp(2 * t); }, Tmax, 0.0, 2.0, L3);
    EXPECT_NEAR(ad::persistence_check(pair, 12.0).ratio, 1.0, 0.03);
    for (double T = 6.0; T <= 12.0; T += 0.5) {
        const double r = ad::persistence_check(pair, T).ratio;
        EXPECT_GT(r, 0.5);
        EXPECT_LE(r, 1.0);
    }
}

TEST(Covering, BoxExamples) {
    const auto a = ad::covering_number_box(1, 1.0, 0.1);
    EXPECT_EQ(a.count, 10u);
    EXPECT_NEAR(a.overlap_ratio, 1.0, 1e-12);
    const auto b = ad::covering_number_box(2, 1.0, 0.25);
    EXPECT_EQ(b.count, 16u);
    EXPECT_NEAR(b.overlap_ratio, 1.0, 1e-12);
    const auto c = ad::covering_number_box(2, 1.0, 0.3);
    EXPECT_EQ(c.count, 16u);
    EXPECT_NEAR(c.overlap_ratio, 1.44, 1e-12);
    double prev = c.overlap_ratio;
    for (int k : {5, 10, 20, 40}) {
        const double r = ad::covering_number_box(2, 1.0, 1.0 / k - 1e-3).overlap_ratio;
        EXPECT_LT(r, prev);
        prev = r;
    }
    EXPECT_THROW(ad::covering_number_box(2, 1.0, 1.0), hg::DomainError);
}
