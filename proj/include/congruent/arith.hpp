#pragma once

// Exact integer and rational arithmetic, plus the number-theoretic primitives the
// rest of the library is built on: Legendre symbols, square roots modulo prime
// powers, CRT, two-squares decomposition, and continued-fraction reconstruction
// of rationals from high-precision reals.

#include "congruent/real.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace congruent {

using BigInt = mpz_class;

/// Exact rational in lowest terms with a positive denominator.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(const BigInt& value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(BigInt numerator, BigInt denominator) : num_(std::move(numerator)), den_(std::move(denominator)) {
        if (den_ == 0) throw std::domain_error("rational with zero denominator");
        normalize();
    }

    /// Parses "p/q" or "p".
    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        try {
            if (slash == std::string::npos) return Rational(BigInt(text));
            return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("not a rational: " + text);
        }
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    int sign() const { return sgn(num_); }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    std::string to_string() const {
        if (den_ == 1) return num_.get_str();
        return num_.get_str() + "/" + den_.get_str();
    }

    Real to_real(mpfr_prec_t bits) const { return Real(num_, bits) / Real(den_, bits); }

    Rational operator-() const { return Rational(-num_, den_, Normalized{}); }
    friend Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

    Rational& operator+=(const Rational& o) { return *this = Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
    Rational& operator-=(const Rational& o) { return *this = Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
    Rational& operator*=(const Rational& o) { return *this = Rational(num_ * o.num_, den_ * o.den_); }
    Rational& operator/=(const Rational& o) {
        if (o.num_ == 0) throw std::domain_error("rational division by zero");
        return *this = Rational(num_ * o.den_, den_ * o.num_);
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return a.num_ * b.den_ < b.num_ * a.den_; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
    struct Normalized {};
    Rational(BigInt n, BigInt d, Normalized) : num_(std::move(n)), den_(std::move(d)) {}

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        BigInt g = gcd(num_, den_);
        if (g != 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_;
};

// ---------------------------------------------------------------------------
// Machine-word modular arithmetic

inline std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (e > 0) {
        if (e & 1) r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    return r;
}

/// Inverse of a modulo m; throws if gcd(a, m) != 1.
inline std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
    std::int64_t g = m, x = 0, x1 = 1, a1 = mod_floor(a, m);
    while (a1 != 0) {
        std::int64_t q = g / a1;
        std::tie(g, a1) = std::make_pair(a1, g - q * a1);
        std::tie(x, x1) = std::make_pair(x1, x - q * x1);
    }
    if (g != 1) throw std::invalid_argument("inverse_mod: not invertible");
    return mod_floor(x, m);
}

/// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s && composite; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) composite = false;
        }
        if (composite) return false;
    }
    return true;
}

struct PrimePower {
    std::int64_t prime;
    int exponent;

    std::int64_t value() const {
        std::int64_t v = 1;
        for (int i = 0; i < exponent; ++i) v *= prime;
        return v;
    }

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Trial-division factorization, ascending primes. Intended for the moderate
/// sizes that occur here (conductors of curves with n up to ~10^6).
inline std::vector<PrimePower> factorize(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    std::vector<PrimePower> out;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

inline bool is_square_free(std::int64_t n) {
    if (n < 1) return false;
    for (const auto& f : factorize(n)) {
        if (f.exponent > 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Quadratic residues

namespace detail {

/// Jacobi symbol (a/m) for odd m > 0; no primality check.
inline int jacobi(std::int64_t a, std::int64_t m) {
    std::int64_t x = mod_floor(a, m);
    int result = 1;
    while (x != 0) {
        while (x % 2 == 0) {
            x /= 2;
            std::int64_t r = m % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(x, m);
        if (x % 4 == 3 && m % 4 == 3) result = -result;
        x %= m;
    }
    return m == 1 ? result : 0;
}

}  // namespace detail

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre_symbol(std::int64_t a, std::int64_t p) {
    if (p < 3 || p % 2 == 0 || !is_prime(static_cast<std::uint64_t>(p))) {
        throw std::invalid_argument("legendre_symbol: p must be an odd prime, got " + std::to_string(p));
    }
    return detail::jacobi(a, p);
}

/// Square root of a unit a modulo an odd prime p (Tonelli-Shanks).
inline std::optional<std::int64_t> sqrt_mod_prime(std::int64_t a, std::int64_t p) {
    a = mod_floor(a, p);
    if (a == 0) return 0;
    if (p == 2) return a;
    if (detail::jacobi(a, p) != 1) return std::nullopt;
    const auto up = static_cast<std::uint64_t>(p);
    const auto ua = static_cast<std::uint64_t>(a);
    if (p % 4 == 3) return static_cast<std::int64_t>(pow_mod(ua, (up + 1) / 4, up));

    std::uint64_t q = up - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    std::uint64_t z = 2;
    while (detail::jacobi(static_cast<std::int64_t>(z), p) != -1) ++z;

    std::uint64_t c = pow_mod(z, q, up);
    std::uint64_t x = pow_mod(ua, (q + 1) / 2, up);
    std::uint64_t t = pow_mod(ua, q, up);
    int m = s;
    while (t != 1) {
        int i = 0;
        std::uint64_t t2 = t;
        while (t2 != 1) {
            t2 = mul_mod(t2, t2, up);
            ++i;
        }
        std::uint64_t b = c;
        for (int j = 0; j < m - i - 1; ++j) b = mul_mod(b, b, up);
        x = mul_mod(x, b, up);
        c = mul_mod(b, b, up);
        t = mul_mod(t, c, up);
        m = i;
    }
    return static_cast<std::int64_t>(x);
}

namespace detail {

inline std::int64_t int_pow(std::int64_t p, int k) {
    std::int64_t v = 1;
    for (int i = 0; i < k; ++i) v *= p;
    return v;
}

/// All square roots of an odd (unit) residue a modulo 2^k, ascending.
inline std::vector<std::int64_t> unit_sqrts_mod_two_power(std::int64_t a, int k) {
    const std::int64_t mod = int_pow(2, k);
    a = mod_floor(a, mod);
    if (k == 1) return {1};
    if (k == 2) {
        if (a % 4 != 1) return {};
        return {1, 3};
    }
    if (a % 8 != 1) return {};
    // Lift x^2 = a from mod 2^j to mod 2^(j+1); x is determined mod 2^(j-1).
    std::uint64_t x = 1;
    for (int j = 3; j < k; ++j) {
        const std::uint64_t next = std::uint64_t{1} << (j + 1);
        if ((x * x - static_cast<std::uint64_t>(a)) % next != 0) x += std::uint64_t{1} << (j - 1);
    }
    const auto ux = static_cast<std::int64_t>(x % static_cast<std::uint64_t>(mod));
    const std::int64_t half = mod / 2;
    std::vector<std::int64_t> roots{ux, mod_floor(-ux, mod), mod_floor(ux + half, mod), mod_floor(-ux + half, mod)};
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

/// All square roots of a unit a modulo p^k for odd p, ascending.
inline std::vector<std::int64_t> unit_sqrts_mod_odd_prime_power(std::int64_t a, std::int64_t p, int k) {
    auto r = sqrt_mod_prime(a, p);
    if (!r) return {};
    std::int64_t x = *r;
    std::int64_t mod = p;
    for (int j = 1; j < k; ++j) {
        mod *= p;
        // Hensel: x <- x - (x^2 - a) / (2x)
        const auto um = static_cast<std::uint64_t>(mod);
        std::int64_t fx = mod_floor(static_cast<std::int64_t>(mul_mod(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(x), um)) - mod_floor(a, mod), mod);
        std::int64_t inv = inverse_mod(mod_floor(2 * x, mod), mod);
        x = mod_floor(x - static_cast<std::int64_t>(mul_mod(static_cast<std::uint64_t>(fx), static_cast<std::uint64_t>(inv), um)), mod);
    }
    std::int64_t other = mod_floor(-x, mod);
    if (other < x) std::swap(x, other);
    if (x == other) return {x};
    return {x, other};
}

}  // namespace detail

/// All square roots of a modulo p^k, ascending, for a coprime to p.
inline std::vector<std::int64_t> unit_sqrts_mod_prime_power(std::int64_t a, std::int64_t p, int k) {
    if (k < 1) throw std::invalid_argument("unit_sqrts_mod_prime_power: k must be positive");
    if (mod_floor(a, p) == 0) throw std::invalid_argument("unit_sqrts_mod_prime_power: a must be a unit mod p");
    if (p == 2) return detail::unit_sqrts_mod_two_power(a, k);
    return detail::unit_sqrts_mod_odd_prime_power(a, p, k);
}

/// Least nonnegative x < p^k with x^2 = a (mod p^k), or nullopt.
inline std::optional<std::int64_t> sqrt_mod_prime_power(std::int64_t a, std::int64_t p, int k) {
    if (k < 1) throw std::invalid_argument("sqrt_mod_prime_power: k must be positive");
    if (!is_prime(static_cast<std::uint64_t>(p))) throw std::invalid_argument("sqrt_mod_prime_power: p must be prime");
    const std::int64_t mod = detail::int_pow(p, k);
    a = mod_floor(a, mod);
    if (a == 0) return 0;
    int e = 0;
    std::int64_t unit = a;
    while (unit % p == 0) {
        unit /= p;
        ++e;
    }
    if (e % 2 != 0) return std::nullopt;
    // x = p^(e/2) y with y^2 = unit (mod p^(k-e)); the least x comes from the least y.
    auto roots = unit_sqrts_mod_prime_power(unit, p, k - e);
    if (roots.empty()) return std::nullopt;
    return detail::int_pow(p, e / 2) * roots.front();
}

// ---------------------------------------------------------------------------
// CRT

struct Residue {
    std::int64_t value;
    std::int64_t modulus;
};

/// Combines residues with pairwise coprime moduli into value mod the product.
inline Residue crt_combine(const std::vector<Residue>& residues) {
    Residue acc{0, 1};
    for (const auto& r : residues) {
        if (r.modulus < 1) throw std::invalid_argument("crt_combine: moduli must be positive");
        if (std::gcd(acc.modulus, r.modulus) != 1) throw std::invalid_argument("crt_combine: moduli are not coprime");
        // acc.value + acc.modulus * t = r.value (mod r.modulus)
        const std::int64_t m = r.modulus;
        std::int64_t diff = mod_floor(r.value - acc.value, m);
        std::int64_t t = static_cast<std::int64_t>(mul_mod(static_cast<std::uint64_t>(diff),
                                                           static_cast<std::uint64_t>(inverse_mod(acc.modulus % m, m)),
                                                           static_cast<std::uint64_t>(m)));
        const std::int64_t product = acc.modulus * m;
        acc.value = static_cast<std::int64_t>((static_cast<__int128>(acc.modulus) * t + acc.value) % product);
        acc.modulus = product;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Two squares

/// p = a^2 + b^2 with a odd and b even, both positive, for a prime p = 1 (mod 4).
inline std::pair<std::int64_t, std::int64_t> cornacchia_two_squares(std::int64_t p) {
    if (p % 4 != 1 || !is_prime(static_cast<std::uint64_t>(p))) {
        throw std::invalid_argument("cornacchia_two_squares: need a prime p = 1 mod 4, got " + std::to_string(p));
    }
    std::int64_t x = *sqrt_mod_prime(p - 1, p);
    if (2 * x > p) x = p - x;
    // Euclid on (p, x) until the remainder drops below sqrt(p).
    std::int64_t r0 = p, r1 = x;
    while (r1 * r1 > p) {
        std::int64_t t = r0 % r1;
        r0 = r1;
        r1 = t;
    }
    std::int64_t a = r1;
    std::int64_t rest = p - a * a;
    std::int64_t b = static_cast<std::int64_t>(std::sqrt(static_cast<double>(rest)));
    while (b * b > rest) --b;
    while ((b + 1) * (b + 1) <= rest) ++b;
    if (b * b != rest) throw std::logic_error("cornacchia_two_squares: no decomposition found");
    if (a % 2 == 0) std::swap(a, b);
    return {a, b};
}

// ---------------------------------------------------------------------------
// Rational reconstruction

/// Best rational approximation p/q of x with q <= den_bound, via continued
/// fraction convergents. Accepts the first convergent with
/// |x - p/q| < 1 / (2 q den_bound); returns nullopt if none qualifies.
inline std::optional<Rational> rational_reconstruct(const Real& x, const BigInt& den_bound) {
    if (den_bound < 1) throw std::invalid_argument("rational_reconstruct: den_bound must be positive");
    const mpfr_prec_t bits = x.precision();
    BigInt h_prev = 1, h = x.floor_to_integer();
    BigInt k_prev = 0, k = 1;
    Real frac = x - Real(h, bits);
    const Real bound(den_bound, bits);

    for (int step = 0; step < 4 * static_cast<int>(bits); ++step) {
        // Error of the current convergent, measured against the original x.
        Real err = abs(x - Real(h, bits) / Real(k, bits));
        if (err * Real(k, bits) * bound * 2L < Real(1L, bits)) return Rational(h, k);
        if (frac.is_zero()) return Rational(h, k);

        Real inv = Real(1L, bits) / frac;
        BigInt a = inv.floor_to_integer();
        frac = inv - Real(a, bits);

        BigInt h_next = a * h + h_prev;
        BigInt k_next = a * k + k_prev;
        if (k_next > den_bound) return std::nullopt;
        h_prev = std::move(h);
        h = std::move(h_next);
        k_prev = std::move(k);
        k = std::move(k_next);
    }
    return std::nullopt;
}

/// Exact square root of a nonnegative rational, or nullopt.
inline std::optional<Rational> is_rational_square(const Rational& r) {
    if (r.sign() < 0) return std::nullopt;
    if (!mpz_perfect_square_p(r.num().get_mpz_t()) || !mpz_perfect_square_p(r.den().get_mpz_t())) return std::nullopt;
    return Rational(sqrt(r.num()), sqrt(r.den()));
}

}  // namespace congruent
