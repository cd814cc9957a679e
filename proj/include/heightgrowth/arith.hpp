#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace heightgrowth {

using BigInt = boost::multiprecision::cpp_int;

namespace arith {

/// Primes <= limit by the sieve of Eratosthenes.
inline std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
    std::vector<std::int64_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::int64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::int64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

/// Shared prime table for trial division; covers cofactors up to 10^12.
inline const std::vector<std::int64_t>& small_primes() {
    static const std::vector<std::int64_t> table = primes_up_to(1'000'000);
    return table;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin for all 64-bit inputs (fixed witness set).
inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    const auto un = static_cast<std::uint64_t>(n);
    std::uint64_t d = un - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, un);
        if (x == 1 || x == un - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, un);
            if (x == un - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

struct PrimePower {
    std::int64_t p;
    int k;
    bool operator==(const PrimePower&) const = default;
};

/// Trial-division factorization, primes ascending. Supports n <= 10^12, and
/// larger n whose cofactor after removing primes < 10^6 is itself prime.
inline std::vector<PrimePower> factorize(std::int64_t n) {
    if (n <= 0) throw DomainError("factorize: argument must be positive");
    std::vector<PrimePower> out;
    for (std::int64_t p : small_primes()) {
        if (p * p > n) break;
        if (n % p != 0) continue;
        int k = 0;
        while (n % p == 0) {
            n /= p;
            ++k;
        }
        out.push_back({p, k});
    }
    if (n > 1) {
        const std::int64_t last = small_primes().back();
        if (n > last * last && !is_prime(n))
            throw DomainError("factorize: cofactor beyond trial-division range");
        out.push_back({n, 1});
    }
    return out;
}

/// Same as above for arbitrary-precision input; throws if a cofactor does not
/// fit the 64-bit path.
inline std::vector<PrimePower> factorize(BigInt n) {
    if (n <= 0) throw DomainError("factorize: argument must be positive");
    std::vector<PrimePower> out;
    for (std::int64_t p : small_primes()) {
        if (n < BigInt(p) * p) break;
        if (n % p != 0) continue;
        int k = 0;
        while (n % p == 0) {
            n /= p;
            ++k;
        }
        out.push_back({p, k});
    }
    if (n > 1) {
        if (n > BigInt(std::numeric_limits<std::int64_t>::max()))
            throw DomainError("factorize: cofactor exceeds 64 bits");
        const auto c = n.convert_to<std::int64_t>();
        const std::int64_t last = small_primes().back();
        if (c > last * last && !is_prime(c))
            throw DomainError("factorize: cofactor beyond trial-division range");
        out.push_back({c, 1});
    }
    return out;
}

/// p-adic valuation of a nonzero integer.
inline int valuation(BigInt n, std::int64_t p) {
    if (n == 0) throw DomainError("valuation of zero");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline BigInt ipow(std::int64_t base, unsigned exp) {
    return boost::multiprecision::pow(BigInt(base), exp);
}

inline std::int64_t ipow64(std::int64_t base, unsigned exp) {
    std::int64_t r = 1;
    while (exp--) r *= base;
    return r;
}

/// Double with correct rounding for huge values (cpp_int -> double).
inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

inline double log_big(const BigInt& v) {
    if (v <= 0) throw DomainError("log of non-positive integer");
    const auto bits = static_cast<long>(boost::multiprecision::msb(v));
    if (bits < 1000) return std::log(to_double(v));
    const long shift = bits - 60;
    const BigInt top = v >> shift;
    return std::log(to_double(top)) + static_cast<double>(shift) * std::log(2.0);
}

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace arith
}  // namespace heightgrowth
