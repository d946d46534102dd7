#pragma once

// Period lattice of E(n) and the Weierstrass functions on it.
//
// E(n)(C) = C / (omega1 Z[i]) with omega1 = pi G / sqrt(n) and G = 1/M(sqrt 2, 1)
// the Gauss constant. Since the lattice is square (tau = i), the Weierstrass
// functions are evaluated from their q-expansions at the fixed nome
// q = e^{-2 pi} ~ 0.00187, which needs about 0.37 terms per digit.

#include "congruent/arith.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace congruent {

/// Guard digits carried on top of the requested working precision.
inline constexpr unsigned kGuardDigits = 10;

/// Arithmetic-geometric mean, iterated until |x - y| <= 10^(1 - P) with P the
/// decimal precision of the inputs.
inline Real agm(Real x, Real y) {
    if (x.sign() < 0 || y.sign() < 0) throw std::invalid_argument("agm: arguments must be nonnegative");
    const mpfr_prec_t bits = std::max(x.precision(), y.precision());
    x = x.at_precision(bits);
    y = y.at_precision(bits);
    const Real tol = Real::pow10(1 - static_cast<long>(bits_to_digits(bits)), bits);
    for (int i = 0; i < 10000; ++i) {
        if (abs(x - y) <= tol) break;
        Real next_y = sqrt(x * y);
        x = (x + y) / 2L;
        y = std::move(next_y);
    }
    return x;
}

/// The square lattice omega1 Z[i].
struct PeriodLattice {
    std::int64_t n = 1;
    unsigned digits = 60;
    Real gauss_constant;  // 1 / M(sqrt 2, 1)
    Real omega1;          // real period, pi G / sqrt(n)

    mpfr_prec_t bits() const { return omega1.precision(); }
    Complex omega2() const { return {Real(0L, bits()), omega1}; }
};

inline PeriodLattice periods(std::int64_t n, unsigned digits) {
    if (n < 1) throw std::invalid_argument("periods: n must be positive");
    const mpfr_prec_t bits = digits_to_bits(digits + kGuardDigits);
    PeriodLattice lat;
    lat.n = n;
    lat.digits = digits;
    lat.gauss_constant = Real(1L, bits) / agm(sqrt(Real(2L, bits)), Real(1L, bits));
    lat.omega1 = Real::pi(bits) * lat.gauss_constant / sqrt(Real(n, bits));
    return lat;
}

/// z - (m + k i) omega1 with both coordinates in [0, omega1).
inline Complex reduce_mod_lattice(const Complex& z, const PeriodLattice& lat) {
    Real re = z.re - floor(z.re / lat.omega1) * lat.omega1;
    Real im = z.im - floor(z.im / lat.omega1) * lat.omega1;
    // Rounding can land exactly on omega1.
    if (re >= lat.omega1) re -= lat.omega1;
    if (im >= lat.omega1) im -= lat.omega1;
    return {std::move(re), std::move(im)};
}

class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct WeierstrassValues {
    Complex wp;
    Complex wp_prime;
};

/// Weierstrass p and p' for the lattice, from the q-expansion
///   p(z) = (2 pi i / w)^2 [1/12 + x/(1-x)^2 + sum_k (q^k x/(1-q^k x)^2 + q^k/x/(1-q^k/x)^2 - 2 q^k/(1-q^k)^2)]
/// with x = e^{2 pi i z / w}, q = e^{-2 pi}; p' is its term-by-term derivative.
inline WeierstrassValues weierstrass(const Complex& z, const PeriodLattice& lat) {
    const mpfr_prec_t bits = std::max(z.precision(), lat.bits());
    const Real omega = lat.omega1.at_precision(bits);

    // u = z / omega, translated to Re u in [0, 1), Im u in [-1/2, 1/2].
    Real ur = z.re.at_precision(bits) / omega;
    Real ui = z.im.at_precision(bits) / omega;
    ur -= floor(ur);
    ui -= Real(ui.round_to_integer(), bits);

    const Real pole_tol = Real::pow10(-static_cast<long>(lat.digits / 2), bits);
    Real dist = std::min(hypot(ur, ui), hypot(ur - 1L, ui));
    if (dist < pole_tol) {
        throw PoleError("weierstrass: z is within 10^-" + std::to_string(lat.digits / 2) + " omega1 of a lattice point");
    }

    const Real two_pi = Real::pi(bits) * 2L;
    const Complex x = exp(Complex(-(two_pi * ui), two_pi * ur));
    const Complex x_inv = exp(Complex(two_pi * ui, -(two_pi * ur)));
    const Real q = exp(-two_pi);
    const Complex one(Real(1L, bits));

    auto wp_term = [&](const Complex& t) {
        Complex d = one - t;
        return t / (d * d);
    };
    auto wp_prime_term = [&](const Complex& t) {
        Complex d = one - t;
        return t * (one + t) / (d * d * d);
    };

    Complex s = wp_term(x);
    s.re += Real(1L, bits) / 12L;
    Complex ds = wp_prime_term(x);

    // |q^k x^{+-1}| <= e^{-2 pi (k - 1/2)}; stop well below the target precision.
    const Real stop = Real::pow10(-static_cast<long>(bits_to_digits(bits)) - 5, bits);
    Real qk = q;
    for (int k = 1; k < 100000; ++k) {
        const Complex tp = x * qk;
        const Complex tm = x_inv * qk;
        Real dq = Real(1L, bits) - qk;
        s += wp_term(tp) + wp_term(tm);
        s.re -= qk / (dq * dq) * 2L;
        ds += wp_prime_term(tp) - wp_prime_term(tm);
        if (qk * exp(two_pi / 2L) < stop) break;
        qk *= q;
    }

    // c = 2 pi i / omega; c^2 = -(2 pi / omega)^2, c^3 = -i (2 pi / omega)^3.
    const Real c = two_pi / omega;
    const Real c2 = c * c;
    WeierstrassValues out;
    out.wp = s * (-c2);
    out.wp_prime = Complex(ds.im * (c2 * c), -(ds.re * (c2 * c)));
    return out;
}

inline Complex wp(const Complex& z, const PeriodLattice& lat) { return weierstrass(z, lat).wp; }
inline Complex wp_prime(const Complex& z, const PeriodLattice& lat) { return weierstrass(z, lat).wp_prime; }

/// A numerical point on y^2 = x^3 - n^2 x; imag_residual is the larger of the
/// imaginary parts of x and y (zero for real points).
struct CurvePointApprox {
    Real x;
    Real y;
    Real imag_residual;
};

/// (p(z), p'(z)/2): the curve is y^2 = x^3 - n^2 x while (p')^2 = 4p^3 - 4n^2 p.
inline CurvePointApprox lattice_to_curve_point(const Complex& z, const PeriodLattice& lat) {
    auto v = weierstrass(z, lat);
    Complex y = v.wp_prime / 2L;
    Real residual = std::max(abs(v.wp.im), abs(y.im));
    return {v.wp.re, y.re, residual};
}

/// S_n: the four classes {0, w/2, i w/2, (1+i) w/2} mod the lattice, i.e. the
/// preimages of O, (n,0), (-n,0), (0,0).
inline std::array<Complex, 4> torsion_image_set(const PeriodLattice& lat) {
    const Real zero(0L, lat.bits());
    const Real half = lat.omega1 / 2L;
    return {Complex(zero, zero), Complex(half, zero), Complex(zero, half), Complex(half, half)};
}

inline Real default_torsion_tolerance(const PeriodLattice& lat) {
    return Real::pow10(-static_cast<long>(lat.digits / 2), lat.bits()) * lat.omega1;
}

/// Distance from z to the nearest point of S_n + lattice.
inline Real distance_to_torsion_image(const Complex& z, const PeriodLattice& lat) {
    const Complex r = reduce_mod_lattice(z, lat);
    Real best(-1L, lat.bits());
    for (const auto& s : torsion_image_set(lat)) {
        // r lies in [0, w)^2; the class representative s may be nearer through a translate.
        for (long dm = -1; dm <= 1; ++dm) {
            for (long dk = -1; dk <= 1; ++dk) {
                Real dre = r.re - s.re - lat.omega1 * dm;
                Real dim = r.im - s.im - lat.omega1 * dk;
                Real d = hypot(dre, dim);
                if (best.sign() < 0 || d < best) best = d;
            }
        }
    }
    return best;
}

inline bool in_torsion_image(const Complex& z, const PeriodLattice& lat, const Real& tol) {
    return distance_to_torsion_image(z, lat) < tol;
}

inline bool in_torsion_image(const Complex& z, const PeriodLattice& lat) {
    return in_torsion_image(z, lat, default_torsion_tolerance(lat));
}

}  // namespace congruent
