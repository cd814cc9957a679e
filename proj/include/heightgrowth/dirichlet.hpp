#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "arith.hpp"
#include "building.hpp"
#include "errors.hpp"
#include "zeta.hpp"

namespace heightgrowth::dirichlet {

/// Local data of the Euler factor at p: c(p) and D(p).
struct EulerFactorParams {
    int d;
    std::int64_t p;
    BigInt c_p;
    BigInt D_p;

    static EulerFactorParams make(int d, std::int64_t p) {
        const building::BuildingParams bp(d, p);
        return {d, p, building::branching_c(bp), building::neighbours_D(bp)};
    }
};

/// D(m) = prod over p^k || m of D(p^k). m up to 10^12.
inline BigInt coeff_D(int d, std::int64_t m) {
    if (m < 1) throw DomainError("coeff_D: m must be >= 1");
    if (d < 2) throw DomainError("coeff_D: d must be >= 2");
    BigInt r = 1;
    for (const auto& [p, k] : arith::factorize(m)) r *= building::sphere_size(building::BuildingParams(d, p), k);
    return r;
}

struct SieveLimits {
    std::int64_t max_entries = 1'000'000;
};

/// D(m) for 1 <= m <= x_max. Immutable after construction.
class CoeffTable {
public:
    CoeffTable(int d, std::int64_t x_max, const SieveLimits& limits = {}) : d_(d), x_max_(x_max) {
        if (d < 2) throw DomainError("coeff_sieve: d must be >= 2");
        if (x_max < 1) throw DomainError("coeff_sieve: x_max must be >= 1");
        if (x_max > limits.max_entries)
            throw BudgetError("coeff_sieve: table size exceeds sieve budget", static_cast<double>(x_max),
                              static_cast<double>(limits.max_entries));
        if (x_max > std::numeric_limits<std::int32_t>::max())
            throw BudgetError("coeff_sieve: table size exceeds index range", static_cast<double>(x_max), 2.1e9);

        const auto n = static_cast<std::size_t>(x_max);
        std::vector<std::int32_t> spf(n + 1, 0);
        for (std::size_t i = 2; i <= n; ++i) {
            if (spf[i]) continue;
            for (std::size_t j = i; j <= n; j += i)
                if (!spf[j]) spf[j] = static_cast<std::int32_t>(i);
        }
        values_.assign(n + 1, BigInt(0));
        values_[1] = 1;
        // c(p) per prime, indexed by p.
        std::vector<BigInt> c_of(n + 1);
        for (std::size_t m = 2; m <= n; ++m) {
            const std::int64_t p = spf[m];
            std::size_t rest = m;
            std::size_t pk = 1;
            while (rest % p == 0) {
                rest /= p;
                pk *= p;
            }
            if (rest == 1) {
                if (pk == static_cast<std::size_t>(p)) {
                    const building::BuildingParams bp(d, p);
                    values_[m] = building::neighbours_D(bp);
                    c_of[p] = building::branching_c(bp);
                } else {
                    values_[m] = values_[m / p] * c_of[p];
                }
            } else {
                values_[m] = values_[pk] * values_[rest];
            }
        }
    }

    int d() const { return d_; }
    std::int64_t x_max() const { return x_max_; }
    const BigInt& at(std::int64_t m) const {
        if (m < 1 || m > x_max_) throw DomainError("CoeffTable: index out of range");
        return values_[static_cast<std::size_t>(m)];
    }
    /// values()[m] = D(m); entry 0 is unused.
    const std::vector<BigInt>& values() const { return values_; }

private:
    int d_;
    std::int64_t x_max_;
    std::vector<BigInt> values_;
};

inline CoeffTable coeff_sieve(int d, std::int64_t x_max, const SieveLimits& limits = {}) {
    return CoeffTable(d, x_max, limits);
}

/// sum_{m <= x} D(m) / m^B, compensated.
inline double partial_sum(const CoeffTable& table, double B, std::int64_t x) {
    if (x < 1) throw DomainError("partial_sum: x must be >= 1");
    if (x > table.x_max()) throw DomainError("partial_sum: x beyond the coefficient table");
    if (B < 0) throw DomainError("partial_sum: B must be >= 0");
    arith::CompensatedSum acc;
    const auto& v = table.values();
    for (std::int64_t m = 1; m <= x; ++m) {
        const double num = arith::to_double(v[static_cast<std::size_t>(m)]);
        acc.add(B == 0.0 ? num : num * std::pow(static_cast<double>(m), -B));
    }
    return acc.value();
}

inline double partial_sum(int d, double B, std::int64_t x, const SieveLimits& limits = {}) {
    return partial_sum(coeff_sieve(d, x, limits), B, x);
}

// ---------------------------------------------------------------------------
// Euler products

/// Integer polynomial in p, coefficient j multiplies p^j.
using PolyP = std::vector<double>;

inline PolyP poly_mul(const PolyP& a, const PolyP& b) {
    PolyP r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline double poly_eval(const PolyP& a, double p) {
    double r = 0.0;
    for (std::size_t j = a.size(); j-- > 0;) r = r * p + a[j];
    return r;
}

inline double poly_abs_sum(const PolyP& a) {
    double r = 0.0;
    for (double c : a) r += std::abs(c);
    return r;
}

/// Euler factors of the form (1 - A(p) p^{-ms}) / (1 - C(p) p^{-ms}).
struct EulerFamily {
    PolyP numer;  // A
    PolyP denom;  // C
    int scale = 1;  // m

    int degree() const { return static_cast<int>(denom.size()) - 1; }
    /// Abscissa right of which the product over all primes converges.
    double abscissa() const { return (degree() + 1.0) / scale; }

    /// PGL_d: C = c(p), A = c(p) - D(p).
    static EulerFamily pgl(int d) {
        if (d < 2) throw DomainError("EulerFamily: d must be >= 2");
        PolyP c(d, 0.0);
        for (int j = 1; j <= d - 2; ++j) c[j] = 1.0;
        c[d - 1] = d - 1.0;
        PolyP a = c;
        for (int j = 0; j < d; ++j) a[j] -= d - 1.0;
        return {a, c, 1};
    }

    /// SL_2: local factor (1 + p u)/(1 - p^2 u), u = p^{-2s}.
    static EulerFamily sl2() { return {PolyP{0.0, -1.0}, PolyP{0.0, 0.0, 1.0}, 2}; }
};

struct LSeriesValue {
    Complex s;
    Complex value;
    /// Bound on |log(value) - log(L(s))|.
    double truncation_bound;
};

struct EulerOptions {
    /// Add the contribution of primes above the cutoff through prime-zeta
    /// tails; when false the bare truncated product is returned.
    bool tail_correction = true;
    double pole_tolerance = 1e-12;
};

namespace detail {

inline const std::vector<int>& mobius_table() {
    static const std::vector<int> mu = [] {
        std::vector<int> m(129, 1);
        m[0] = 0;
        for (int n = 2; n <= 128; ++n) {
            int x = n, r = 1;
            for (int q = 2; q * q <= x; ++q) {
                if (x % q) continue;
                x /= q;
                if (x % q == 0) {
                    r = 0;
                    break;
                }
                r = -r;
            }
            if (r != 0 && x > 1) r = -r;
            m[n] = r;
        }
        return m;
    }();
    return mu;
}

/// sum_{n > X} n^{-a}, a > 1, bounded by the integral from X.
inline double integer_tail_bound(double x_cut, double a) {
    return std::pow(x_cut, 1.0 - a) / (a - 1.0);
}

/// Prime-zeta tail sum_{p > X} p^{-sigma} via Moebius inversion of the
/// tail zeta zeta_X(t) = zeta(t) prod_{p <= X}(1 - p^{-t}).
class PrimeZetaTail {
public:
    PrimeZetaTail(const std::vector<std::int64_t>& primes, double x_cut) : primes_(primes), x_cut_(x_cut) {}

    /// Returns the tail and accumulates a rounding-error estimate.
    Complex operator()(Complex sigma, double& err) const {
        if (!(sigma.real() > 1.0)) throw DomainError("prime zeta tail requires Re > 1");
        Complex total = 0.0;
        const auto& mu = mobius_table();
        for (int n = 1; n < static_cast<int>(mu.size()); ++n) {
            const double a = n * sigma.real();
            const double size = 2.0 * integer_tail_bound(x_cut_, a);
            if (size < 1e-22) break;
            if (mu[n] == 0) continue;
            const Complex t = static_cast<double>(n) * sigma;
            const Complex z = zeta_em(t, ZetaOptions{0.0});
            Complex prod = 1.0;
            for (std::int64_t p : primes_) prod *= 1.0 - std::exp(-t * std::log(static_cast<double>(p)));
            total += static_cast<double>(mu[n]) / n * std::log(z * prod);
            err += 1e-14 * std::max(1.0, std::abs(z)) / n;
        }
        return total;
    }

private:
    const std::vector<std::int64_t>& primes_;
    double x_cut_;
};

}  // namespace detail

/// Euler product of `family` over primes <= prime_cutoff, optionally
/// completed by the tail of log F_p expanded in powers of C(p)p^{-ms} and
/// A(p)p^{-ms}.
inline LSeriesValue L_euler(const EulerFamily& family, Complex s, std::int64_t prime_cutoff,
                            const EulerOptions& opt = {}) {
    if (prime_cutoff < 2) throw DomainError("L_euler: prime_cutoff must be >= 2");
    if (!(s.real() > family.abscissa())) throw DomainError("L_euler: Re(s) must exceed the Euler-product abscissa");

    const std::vector<std::int64_t> primes = arith::primes_up_to(prime_cutoff);
    const double m = family.scale;
    Complex value = 1.0;
    for (std::int64_t p : primes) {
        const double pd = static_cast<double>(p);
        const Complex u = std::exp(-m * s * std::log(pd));
        const Complex den = 1.0 - poly_eval(family.denom, pd) * u;
        if (std::abs(den) < opt.pole_tolerance) throw DomainError("L_euler: s is within pole tolerance of a local pole");
        value *= (1.0 - poly_eval(family.numer, pd) * u) / den;
    }

    // Tail series over k: term k involves C^k - A^k and p^{-kms}.
    const double x_cut = static_cast<double>(prime_cutoff);
    const int deg = family.degree();
    const double gamma_c = poly_abs_sum(family.denom);
    const double gamma_a = poly_abs_sum(family.numer);
    const double excess = m * s.real() - deg;  // > 1 by the abscissa check
    if (gamma_c * std::pow(x_cut, -excess) >= 1.0)
        throw DomainError("L_euler: prime cutoff too small for the tail expansion");
    auto term_bound = [&](int k) {
        return (std::pow(gamma_c, k) + std::pow(gamma_a, k)) / k * detail::integer_tail_bound(x_cut, k * excess);
    };
    auto remainder_from = [&](int k0) {
        double r = 0.0;
        for (int k = k0; k < k0 + 200; ++k) {
            const double b = term_bound(k);
            r += b;
            if (b < 1e-30) break;
        }
        return r;
    };

    // A few ulps of rounding per local factor, accumulated linearly.
    const double product_rounding = 8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(primes.size());
    if (!opt.tail_correction) return {s, value, remainder_from(1) + product_rounding};

    detail::PrimeZetaTail tail(primes, x_cut);
    double numeric_err = 0.0;
    Complex log_tail = 0.0;
    PolyP ck{1.0}, ak{1.0};
    int k = 1;
    for (; k <= 64; ++k) {
        if (remainder_from(k) < 1e-17) break;
        ck = poly_mul(ck, family.denom);
        ak = poly_mul(ak, family.numer);
        for (std::size_t j = 0; j < ck.size(); ++j) {
            const double coef = ck[j] - (j < ak.size() ? ak[j] : 0.0);
            if (coef == 0.0) continue;
            double err = 0.0;
            log_tail += coef / k * tail(m * k * s - static_cast<double>(j), err);
            numeric_err += std::abs(coef) / k * err;
        }
    }
    return {s, value * std::exp(log_tail), remainder_from(k) + numeric_err + product_rounding};
}

inline LSeriesValue L_euler(int d, Complex s, std::int64_t prime_cutoff, const EulerOptions& opt = {}) {
    return L_euler(EulerFamily::pgl(d), s, prime_cutoff, opt);
}

inline LSeriesValue L_euler_sl2(Complex s, std::int64_t prime_cutoff, const EulerOptions& opt = {}) {
    return L_euler(EulerFamily::sl2(), s, prime_cutoff, opt);
}

/// zeta(s) zeta(s-1) / zeta(2s), Re(s) > 2.
inline Complex L_closed_pgl2(Complex s, const ZetaOptions& opt = {}) {
    if (!(s.real() > 2.0 + opt.margin)) throw DomainError("L_closed_pgl2: requires Re(s) > 2");
    return zeta_em(s, opt) * zeta_em(s - 1.0, opt) / zeta_em(2.0 * s, opt);
}

/// zeta(2(s-1)) zeta(2s-1) / zeta(4s-2), Re(s) > 3/2.
inline Complex L_closed_sl2(Complex s, const ZetaOptions& opt = {}) {
    if (!(s.real() > 1.5 + opt.margin)) throw DomainError("L_closed_sl2: requires Re(s) > 3/2");
    return zeta_em(2.0 * (s - 1.0), opt) * zeta_em(2.0 * s - 1.0, opt) / zeta_em(4.0 * s - 2.0, opt);
}

// ---------------------------------------------------------------------------
// Pole abscissas

struct PoleAbscissa {
    std::int64_t p;
    double s_p;
};

struct PoleTable {
    int d;
    std::vector<PoleAbscissa> entries;  // decreasing s_p
    double b0;                          // s_2
    int count_above_d;
};

/// s_p = log c(p) / log p.
inline double pole_abscissa(int d, std::int64_t p) {
    const BigInt c = building::branching_c(building::BuildingParams(d, p));
    return arith::log_big(c) / std::log(static_cast<double>(p));
}

inline PoleTable pole_abscissas(int d, std::int64_t p_max) {
    if (d < 2) throw DomainError("pole_abscissas: d must be >= 2");
    if (p_max < 2) throw DomainError("pole_abscissas: p_max must be >= 2");
    PoleTable t{d, {}, pole_abscissa(d, 2), 0};
    for (std::int64_t p : arith::primes_up_to(p_max)) {
        const double sp = pole_abscissa(d, p);
        t.entries.push_back({p, sp});
        if (sp > d) ++t.count_above_d;
    }
    std::stable_sort(t.entries.begin(), t.entries.end(),
                     [](const PoleAbscissa& a, const PoleAbscissa& b) { return a.s_p > b.s_p; });
    return t;
}

/// Closed form of s_2: log(d 2^{d-1} - 2) / log 2.
inline double s2_closed_form(int d) { return std::log2(d * std::ldexp(1.0, d - 1) - 2.0); }

// ---------------------------------------------------------------------------
// Residues

enum class Variant { pgl2, sl2 };

struct ResidueEstimate {
    Variant variant;
    double pole;           // 2 or 3/2
    double direct;         // zeta(2)/zeta(4) or zeta(2)/(2 zeta(4))
    double extrapolated;   // Richardson limit of (s - pole) L(s)
    double difference;     // extrapolated - direct
    double naive_1e3;      // (s - pole) L(s) at s = pole + 1e-3
    double stated;         // value printed alongside the closed form
};

inline ResidueEstimate residue_estimate(Variant v) {
    const double pole = v == Variant::pgl2 ? 2.0 : 1.5;
    auto f = [&](double h) {
        const Complex s(pole + h, 0.0);
        const Complex L = v == Variant::pgl2 ? L_closed_pgl2(s, ZetaOptions{1e-9}) : L_closed_sl2(s, ZetaOptions{1e-9});
        return h * L.real();
    };
    const double f2 = f(1e-2), f3 = f(1e-3), f4 = f(1e-4);
    const double r23 = (10.0 * f3 - f2) / 9.0;
    const double r34 = (10.0 * f4 - f3) / 9.0;
    const double extrap = (100.0 * r34 - r23) / 99.0;
    const double ratio = zeta_em(2.0) / zeta_em(4.0);
    const double direct = v == Variant::pgl2 ? ratio : ratio / 2.0;
    const double stated = v == Variant::pgl2 ? 15.0 / (std::numbers::pi * std::numbers::pi) : 0.5;
    return {v, pole, direct, extrap, extrap - direct, f3, stated};
}

}  // namespace heightgrowth::dirichlet
