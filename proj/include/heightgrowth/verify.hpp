#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "adelic.hpp"
#include "archimedean.hpp"
#include "building.hpp"
#include "counting.hpp"
#include "dirichlet.hpp"
#include "zeta.hpp"

namespace heightgrowth::verify {

enum class Tier { quick, full };

struct VerifyOptions {
    Tier tier = Tier::quick;
    int workers = 1;
};

struct CheckResult {
    int id;
    std::string name;
    bool passed;
    std::vector<std::string> details;  // deterministic; no timings
    double seconds = 0.0;               // reported separately
};

namespace detail {

inline std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

inline std::string num(double v) { return fmt("%.12g", v); }

struct Check {
    CheckResult r;
    Check(int id, std::string name) : r{id, std::move(name), true, {}} {}
    void require(bool ok, std::string what) {
        if (!ok) r.passed = false;
        r.details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(std::string what) { r.details.push_back("note " + what); }
};

inline std::string big(const BigInt& v) { return v.str(); }

}  // namespace detail

// 1. The s_2 / s_3 table for n = 2..6.
inline CheckResult check_pole_table(const VerifyOptions&) {
    detail::Check c(1, "pole table");
    const double s2[] = {1.0, 3.3219280949, 4.9068905956, 6.2854022189, 7.5698556083};
    const double s3[] = {1.0, 2.7712437492, 4.1257498573, 5.3653166773, 6.5507064185};
    for (int n = 2; n <= 6; ++n) {
        const double a = dirichlet::pole_abscissa(n, 2), b = dirichlet::pole_abscissa(n, 3);
        c.require(std::abs(a - s2[n - 2]) < 1e-9 && std::abs(b - s3[n - 2]) < 1e-9,
                  detail::fmt("n=%d s_2=%.10f s_3=%.10f", n, a, b));
    }
    return c.r;
}

// 2. Sphere formula against the BFS oracle.
inline CheckResult check_building_oracle(const VerifyOptions& opt) {
    detail::Check c(2, "building sphere sizes vs BFS");
    struct Case {
        int d;
        std::int64_t p;
        int k;
    };
    std::vector<Case> cases{{2, 2, 6}, {2, 3, 6}, {2, 5, 6}, {3, 2, 2}, {3, 3, 2}};
    if (opt.tier == Tier::full) cases.push_back({2, 7, 6});
    for (const auto& cs : cases) {
        const building::BuildingParams bp(cs.d, cs.p);
        const auto hist = building::distance_histogram(building::enumerate_classes(bp, cs.k));
        BigInt cumulative = 0;
        for (int k = 0; k <= cs.k; ++k) {
            const BigInt formula = building::sphere_size(bp, k);
            const BigInt observed = k < static_cast<int>(hist.size()) ? BigInt(hist[k]) : BigInt(0);
            cumulative += observed;
            const BigInt ball = building::ball_size(bp, k);
            c.require(formula == observed, detail::fmt("d=%d p=%lld k=%d sphere formula=%s bfs=%s", cs.d,
                                                       static_cast<long long>(cs.p), k, formula.str().c_str(),
                                                       observed.str().c_str()));
            c.require(ball == cumulative, detail::fmt("d=%d p=%lld k=%d ball formula=%s bfs=%s", cs.d,
                                                      static_cast<long long>(cs.p), k, ball.str().c_str(),
                                                      cumulative.str().c_str()));
        }
    }
    return c.r;
}

// 3. Euler products against the zeta closed forms.
inline CheckResult check_closed_form_L(const VerifyOptions&) {
    detail::Check c(3, "L-function closed forms");
    for (double s : {2.5, 3.0, 4.0}) {
        const auto e = dirichlet::L_euler(2, dirichlet::Complex(s, 0), 100000);
        const double closed = dirichlet::L_closed_pgl2(dirichlet::Complex(s, 0)).real();
        const double rel = std::abs(e.value.real() / closed - 1.0);
        c.require(rel < 1e-8, detail::fmt("pgl2 s=%.1f euler=%.12g closed=%.12g rel<1e-8", s, e.value.real(), closed));
    }
    for (double s : {2.0, 2.5}) {
        const auto e = dirichlet::L_euler_sl2(dirichlet::Complex(s, 0), 100000);
        const double closed = dirichlet::L_closed_sl2(dirichlet::Complex(s, 0)).real();
        const double rel = std::abs(e.value.real() / closed - 1.0);
        c.require(rel < 1e-8, detail::fmt("sl2 s=%.1f euler=%.12g closed=%.12g rel<1e-8", s, e.value.real(), closed));
    }
    return c.r;
}

// 4. Residues at the rightmost poles.
inline CheckResult check_residues(const VerifyOptions&) {
    detail::Check c(4, "residues");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto pg = dirichlet::residue_estimate(dirichlet::Variant::pgl2);
    c.require(std::abs(pg.direct - 15.0 / pi2) < 1e-10, "pgl2 zeta(2)/zeta(4)=" + detail::num(pg.direct) + " vs 15/pi^2");
    c.require(std::abs(pg.naive_1e3 - 1.5198177547) < 1e-2,
              "pgl2 (s-2)L(s) at s=2.001: " + detail::num(pg.naive_1e3) + ", within 1e-2 of 1.5198177547");
    c.require(std::abs(pg.extrapolated - pg.direct) < 1e-3, "pgl2 extrapolated=" + detail::num(pg.extrapolated));
    const auto sl = dirichlet::residue_estimate(dirichlet::Variant::sl2);
    c.require(std::abs(sl.extrapolated - 7.5 / pi2) < 1e-3,
              "sl2 measured residue=" + detail::num(sl.extrapolated) + " vs zeta(2)/(2 zeta(4))=" + detail::num(7.5 / pi2));
    c.note("sl2 stated residue 1/2 differs from the measured value by " + detail::num(sl.extrapolated - sl.stated));
    return c.r;
}

// 5. Coefficient partial sums.
inline CheckResult check_partial_sums(const VerifyOptions& opt) {
    detail::Check c(5, "partial sums of D_2");
    const double target = 7.5 / (std::numbers::pi * std::numbers::pi);
    std::vector<std::int64_t> xs{1000000};
    if (opt.tier == Tier::full) xs.insert(xs.begin(), {10000, 100000});
    for (auto x : xs) {
        const double s = dirichlet::partial_sum(2, 0.0, x);
        const double ratio = s / (static_cast<double>(x) * static_cast<double>(x));
        c.require(std::abs(ratio / target - 1.0) < 0.05,
                  detail::fmt("x=%lld sum/x^2=%.12g target=%.12g", static_cast<long long>(x), ratio, target));
    }
    return c.r;
}

// 6. Cartan integral for d = 2 against (cosh 2R - 1)/2.
inline CheckResult check_cartan_closed_form(const VerifyOptions&) {
    detail::Check c(6, "cartan integral closed form");
    for (double R : {0.5, 1.0, 3.0, 5.0}) {
        const double v = archimedean::ball_volume_numeric(2, 1.0, R);
        const double exact = (std::cosh(2 * R) - 1) / 2;
        c.require(std::abs(v / exact - 1.0) < 1e-9, detail::fmt("R=%.1f numeric=%.12g exact=%.12g", R, v, exact));
    }
    return c.r;
}

// 7. Growth exponent of b^inf.
inline CheckResult check_exponent(const VerifyOptions&) {
    detail::Check c(7, "archimedean growth exponent");
    std::vector<archimedean::GrowthSample> samples;
    for (int i = 0; i <= 50; ++i) {
        const double R = 5.0 + 0.1 * i;
        samples.push_back({R, archimedean::ball_volume_numeric(2, 1.0, R)});
    }
    const auto fit = archimedean::growth_exponent_fit(samples);
    c.require(std::abs(fit.slope - 2.0) <= 0.02, detail::fmt("d=2 B=1 R in [5,10]: slope=%.6f", fit.slope));
    c.require(std::abs(fit.poly_degree) <= 0.05, detail::fmt("poly degree=%.6f", fit.poly_degree));
    c.note("stated leading factor e^{BT} implies slope B=1; measured slope is 2B");
    return c.r;
}

// 8. Regular and non-regular model functions.
inline CheckResult check_regularity(const VerifyOptions&) {
    detail::Check c(8, "regularity verdicts");
    const double step = 5e-4;
    const std::vector<double> eps{0.1, 0.05, 0.01, 0.005};
    auto tail_grid = [&](double lo, double hi) {
        std::vector<double> t;
        for (auto k = std::llround(lo / step); k <= std::llround(hi / step); ++k) t.push_back(static_cast<double>(k) * step);
        return t;
    };
    const auto T = tail_grid(5.0, 20.0);
    auto run = [&](const std::function<double(double)>& f) {
        return adelic::regularity_report(adelic::sample_function(f, 4.0, 21.0, step), eps, T);
    };
    const auto smooth = run([](double x) { return x * std::exp(2 * x); });
    c.require(smooth.verdict == adelic::Verdict::regular,
              "x e^{2x}: verdict=" + std::string(adelic::to_string(smooth.verdict)) + " gap=" + detail::num(smooth.gap));
    const auto step_fn = run([](double x) { return std::exp(std::floor(x + 1e-9)); });
    const double l1 = step_fn.rows.back().liminf_lower;
    c.require(step_fn.verdict == adelic::Verdict::non_regular && std::abs(l1 - std::exp(-1.0)) < 0.05,
              "e^{[x]}: verdict=" + std::string(adelic::to_string(step_fn.verdict)) + " liminf=" + detail::num(l1));
    const auto tree = run([](double x) { return static_cast<double>(adelic::tree_ball(2, x)); });
    const double l2 = tree.rows.back().liminf_lower;
    c.require(tree.verdict == adelic::Verdict::non_regular && std::abs(l2 - 0.5) < 0.05,
              "tree q=2: verdict=" + std::string(adelic::to_string(tree.verdict)) + " liminf=" + detail::num(l2));
    return c.r;
}

// 9. Persistence of the e^{2T} asymptotic under the D_2(m)/m masses.
inline CheckResult check_persistence(const VerifyOptions&) {
    detail::Check c(9, "persistence lemma");
    const double T = 12.0;
    const std::int64_t x = adelic::floor_exp(T);
    const auto table = dirichlet::coeff_sieve(2, x);
    std::vector<adelic::PointMass> mu;
    mu.reserve(static_cast<std::size_t>(x));
    for (std::int64_t m = 1; m <= x; ++m)
        mu.push_back({std::log(static_cast<double>(m)), arith::to_double(table.at(m)) / static_cast<double>(m)});
    const double L3 = dirichlet::L_closed_pgl2(dirichlet::Complex(3, 0)).real();
    const double head = dirichlet::partial_sum(table, 3.0, x);
    const adelic::MeasurePair pair(std::move(mu), [](double t) { return std::exp(2 * t); }, T, 0.0, 2.0, L3);
    const auto r = adelic::persistence_check(pair, T);
    c.require(std::abs(r.ratio - 1.0) < 0.03, "T=12 ratio=" + detail::num(r.ratio));
    c.require(head <= L3 && L3 - head < 1e-3,
              "C=L(3)=" + detail::num(L3) + " partial sum to e^12=" + detail::num(head) + " tail=" + detail::num(L3 - head));
    return c.r;
}

// 10. Exact counting in PGL_2(Q).
inline CheckResult check_counting(const VerifyOptions& opt) {
    detail::Check c(10, "exact counting");
    const double B = 1.0;
    c.require(counting::pi_count(1.0, B, opt.workers).count == 4, "pi(1)=4");
    c.require(counting::pi_count(0.5, B, opt.workers).count == 0, "pi(0.5)=0");
    const double x_max = opt.tier == Tier::full ? 12.0 : 8.0;
    const std::int64_t N = counting::entry_bound(x_max, B);
    const counting::HeightCensus census(N, B, opt.workers);
    const counting::HeightCensus wider(N + 2, B, opt.workers);
    std::int64_t prev = 0;
    bool monotone = true, saturated = true, bounded = true, slow = true;
    double prev_ratio = 0.0;
    std::string table;
    for (double x = 1.0; x <= x_max + 1e-9; x += 0.5) {
        const auto n = census.count(x);
        const auto local = counting::pi_count(x, B, opt.workers);
        if (n < prev) monotone = false;
        if (wider.count(x) != n || local.count != n) saturated = false;
        const double ratio = static_cast<double>(n) / (x * x);
        if (x >= 3.0) {
            if (ratio < 5.0 || ratio > 20.0) bounded = false;
            if (prev_ratio > 0.0 && (ratio / prev_ratio < 0.75 || ratio / prev_ratio > 1.35)) slow = false;
            prev_ratio = ratio;
        }
        table += detail::fmt(" %g:%lld", x, static_cast<long long>(n));
        prev = n;
    }
    c.note("pi(x) for x=1..." + detail::num(x_max) + " step 0.5:" + table);
    c.require(monotone, "pi nondecreasing on the grid");
    c.require(saturated, detail::fmt("search box N=%lld agrees with N+2 and with per-x bounds", static_cast<long long>(N)));
    c.require(bounded, "pi(x)/x^2 within [5, 20] for x >= 3");
    c.require(slow, "consecutive pi(x)/x^2 ratios within [0.75, 1.35] for x >= 3");
    const auto bc = counting::check_heights_against_buildings(N, {2, 3, 5});
    c.require(bc.mismatches == 0, detail::fmt("SNF vs BFS finite heights: %lld elements, %lld mismatches",
                                              static_cast<long long>(bc.checked), static_cast<long long>(bc.mismatches)));
    return c.r;
}

/// Criteria 1-10. Criterion 11 compares whole reports and lives with the caller.
inline std::vector<std::function<CheckResult(const VerifyOptions&)>> checks() {
    return {check_pole_table, check_building_oracle, check_closed_form_L, check_residues, check_partial_sums,
            check_cartan_closed_form, check_exponent, check_regularity, check_persistence, check_counting};
}

inline std::vector<CheckResult> run_checks(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    for (const auto& f : checks()) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = f(opt);
        } catch (const std::exception& e) {
            r = CheckResult{static_cast<int>(out.size()) + 1, "exception", false, {std::string("FAIL ") + e.what()}};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string format_report(const std::vector<CheckResult>& results, const VerifyOptions& opt) {
    std::string s = detail::fmt("# heightgrowth verify report v1 tier=%s\n", opt.tier == Tier::quick ? "quick" : "full");
    int passed = 0;
    for (const auto& r : results) {
        passed += r.passed;
        s += detail::fmt("[%s] %2d %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
        for (const auto& d : r.details) s += "       " + d + "\n";
    }
    s += detail::fmt("# %d/%zu passed\n", passed, results.size());
    return s;
}

/// Criteria 1-10 followed by 11: the report is rebuilt twice more, once with
/// the other worker count (1 <-> 4), and all three must match byte for byte.
inline std::vector<CheckResult> run_all(const VerifyOptions& opt) {
    auto results = run_checks(opt);
    const auto t0 = std::chrono::steady_clock::now();
    const std::string first = format_report(results, opt);
    VerifyOptions other = opt;
    other.workers = opt.workers == 1 ? 4 : 1;
    const std::string again = format_report(run_checks(opt), opt);
    const std::string swapped = format_report(run_checks(other), opt);
    detail::Check c(11, "determinism");
    c.require(first == again, "repeated run gives an identical report");
    const int lo = std::min(opt.workers, other.workers), hi = std::max(opt.workers, other.workers);
    c.require(first == swapped, detail::fmt("workers %d and %d give identical reports", lo, hi));
    c.r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(c.r);
    return results;
}

}  // namespace heightgrowth::verify
