#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "errors.hpp"

namespace heightgrowth::dirichlet {

using Complex = std::complex<double>;

struct ZetaOptions {
    /// Re(s) must exceed 1 + margin.
    double margin = 1e-6;
};

/// Riemann zeta for Re(s) > 1 by Euler-Maclaurin summation: N - 1 direct
/// terms, the integral and boundary terms, and eight Bernoulli corrections,
/// with N = max(20, ceil|s|).
inline Complex zeta_em(Complex s, const ZetaOptions& opt = {}) {
    if (!(s.real() > 1.0 + opt.margin)) throw DomainError("zeta_em: requires Re(s) > 1");
    // B_{2k} / (2k)!, k = 1..8
    static constexpr std::array<double, 8> bern_over_fact = {
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0,
        -3617.0 / 510.0 / 20922789888000.0,
    };
    const double n_cut = std::max(20.0, std::ceil(std::abs(s)));
    const int n = static_cast<int>(n_cut);

    // Sum small-to-large terms last-first to limit rounding.
    Complex head = 0.0;
    for (int k = n - 1; k >= 1; --k) head += std::exp(-s * std::log(static_cast<double>(k)));

    const double log_n = std::log(n_cut);
    const Complex n_pow = std::exp(-s * log_n);  // N^{-s}
    Complex tail = n_cut * n_pow / (s - 1.0) + 0.5 * n_pow;

    // s(s+1)...(s+2k-2) N^{-s-2k+1}
    Complex rising = s;
    Complex power = n_pow / n_cut;
    for (std::size_t k = 0; k < bern_over_fact.size(); ++k) {
        tail += bern_over_fact[k] * rising * power;
        rising *= (s + static_cast<double>(2 * k + 1)) * (s + static_cast<double>(2 * k + 2));
        power /= n_cut * n_cut;
    }
    return head + tail;
}

inline double zeta_em(double s, const ZetaOptions& opt = {}) { return zeta_em(Complex(s, 0.0), opt).real(); }

}  // namespace heightgrowth::dirichlet
